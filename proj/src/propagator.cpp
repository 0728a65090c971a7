#include "fracmem/propagator.hpp"

#include <cmath>
#include <stdexcept>

#include "fracmem/spectral.hpp"

namespace fracmem {

CharRoots characteristic_roots(const ModelParams& params, double xi2sigma) {
    if (!(xi2sigma >= 0.0)) throw std::invalid_argument("xi2sigma must be nonnegative");
    const double a = params.damping;
    CharRoots r;
    r.damping = a;
    r.omega_sq = params.mass * params.mass + xi2sigma;
    r.discriminant = a * a - r.omega_sq;
    r.degenerate = std::abs(r.discriminant) <= 1e-8 * a * a;
    const std::complex<double> delta = std::sqrt(std::complex<double>(r.discriminant, 0.0));
    r.lambda_plus = -a + delta;
    r.lambda_minus = -a - delta;
    return r;
}

KernelValues kernel_multipliers(const CharRoots& roots, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("kernel time must be nonnegative");
    const double a = roots.damping;
    const double d = roots.discriminant;
    const double z2 = d * t * t;

    // k2 = e^{-at} t sinh(delta t)/(delta t), csh = e^{-at} cosh(delta t),
    // valid for real and imaginary delta alike.
    double k2, csh;
    constexpr double series_window = 1e-8;  // |delta t| < 1e-4
    if (z2 > series_window) {
        const double delta = std::sqrt(d);           // delta < a since omega_sq > 0
        const double ep = std::exp((delta - a) * t);  // exponents are nonpositive
        const double em = std::exp(-(delta + a) * t);
        k2 = (ep - em) / (2.0 * delta);
        csh = 0.5 * (ep + em);
    } else if (z2 < -series_window) {
        const double w = std::sqrt(-d);
        const double e = std::exp(-a * t);
        k2 = e * std::sin(w * t) / w;
        csh = e * std::cos(w * t);
    } else {
        const double e = std::exp(-a * t);
        const double sinhc = 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
        const double cosh_v = 1.0 + z2 / 2.0 + z2 * z2 / 24.0;
        k2 = e * t * sinhc;
        csh = e * cosh_v;
    }

    KernelValues k;
    k.k2 = k2;
    k.k1 = csh + a * k2;
    k.dk2 = csh - a * k2;
    k.dk1 = -roots.omega_sq * k2;
    return k;
}

PropagatorTable::PropagatorTable(std::shared_ptr<const TorusGrid> grid,
                                 const ModelParams& params, double dt)
    : grid_(std::move(grid)), dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("propagator step must be positive");
    const std::size_t n = grid_->num_points();
    const std::vector<double> xi2s = grid_->symbol(params.laplacian_order);
    k1_.resize(n); k2_.resize(n); dk1_.resize(n); dk2_.resize(n);
    f_old_u_.resize(n); f_new_u_.resize(n); f_old_v_.resize(n); f_new_v_.resize(n);

    const double a = params.damping;
    for (std::size_t i = 0; i < n; ++i) {
        const CharRoots r = characteristic_roots(params, xi2s[i]);
        const KernelValues k = kernel_multipliers(r, dt);
        k1_[i] = k.k1; k2_[i] = k.k2; dk1_[i] = k.dk1; dk2_[i] = k.dk2;

        // Moments of K2 over one step, from integrating the mode equation:
        //   M0 = int_0^dt K2,  M1 = int_0^dt s K2(s) ds.
        const double w2 = r.omega_sq;
        const double m0 = (1.0 - k.dk2 - 2.0 * a * k.k2) / w2;
        const double m1 = (k.k2 - dt * k.dk2 - 2.0 * a * dt * k.k2 + 2.0 * a * m0) / w2;
        f_old_u_[i] = m1 / dt;
        f_new_u_[i] = m0 - m1 / dt;
        f_old_v_[i] = k.k2 - m0 / dt;
        f_new_v_[i] = m0 / dt;
    }
}

std::pair<Field, Field> linear_evolve(const Field& u0, const Field& u1, double t,
                                      const ModelParams& params) {
    require_same_grid(u0, u1);
    if (!(t >= 0.0)) throw std::invalid_argument("evolution time must be nonnegative");

    const Field a = to_spectral(u0);
    const Field b = to_spectral(u1);
    const auto& grid = *a.grid_ptr();
    const std::vector<double> xi2s = grid.symbol(params.laplacian_order);

    std::vector<std::complex<double>> uc(grid.num_points());
    std::vector<std::complex<double>> vc(grid.num_points());
    for (std::size_t i = 0; i < grid.num_points(); ++i) {
        const KernelValues k =
            kernel_multipliers(characteristic_roots(params, xi2s[i]), t);
        uc[i] = k.k1 * a.spectral()[i] + k.k2 * b.spectral()[i];
        vc[i] = k.dk1 * a.spectral()[i] + k.dk2 * b.spectral()[i];
    }
    return {Field::from_spectral(a.grid_ptr(), std::move(uc)),
            Field::from_spectral(a.grid_ptr(), std::move(vc))};
}

DecayEnvelopeSeries linear_decay_envelope(const ModelParams& params, const Field& u0,
                                          const Field& u1, double sobolev_index,
                                          int time_derivative,
                                          const std::vector<double>& times) {
    if (time_derivative != 0 && time_derivative != 1)
        throw std::invalid_argument("time_derivative must be 0 or 1");

    const double s = sobolev_index;
    const double sig = params.laplacian_order;
    const double denom =
        sobolev_norm(u0, s + time_derivative * sig) +
        sobolev_norm(u1, std::max(s + (time_derivative - 1) * sig, 0.0));

    DecayEnvelopeSeries out;
    out.times = times;
    if (denom == 0.0) {
        out.skipped = true;
        return out;
    }

    const double rate = linear_decay_rate(params.damping, params.mass);
    out.ratios.reserve(times.size());
    for (double t : times) {
        auto [u, ut] = linear_evolve(u0, u1, t, params);
        const Field& probe = time_derivative == 0 ? u : ut;
        const double r = std::exp(rate * t) * sobolev_norm(probe, s) / denom;
        out.ratios.push_back(r);
        out.sup = std::max(out.sup, r);
    }
    return out;
}

}  // namespace fracmem
