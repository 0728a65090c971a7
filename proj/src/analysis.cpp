#include "fracmem/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fracmem/memory.hpp"
#include "fracmem/spectral.hpp"

namespace fracmem {

namespace {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
struct GaussRule {
    std::vector<double> nodes, weights;
};

const GaussRule& gauss10() {
    static const GaussRule rule = [] {
        constexpr int n = 10;
        GaussRule r;
        r.nodes.resize(n);
        r.weights.resize(n);
        for (int i = 0; i < n; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double step = p1 / dp;
                x -= step;
                if (std::abs(step) < 1e-15) break;
            }
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            r.nodes[i] = x;
            r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        return r;
    }();
    return rule;
}

template <class F>
double gl_panel(const F& f, double a, double b) {
    const GaussRule& g = gauss10();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        s += g.weights[i] * f(mid + half * g.nodes[i]);
    return s * half;
}

std::vector<double> log_spaced(double lo, double hi, int per_decade) {
    const int count =
        std::max(2, static_cast<int>(std::ceil(per_decade * std::log10(hi / lo))) + 1);
    std::vector<double> t(count);
    const double step = std::log(hi / lo) / (count - 1);
    for (int i = 0; i < count; ++i) t[i] = lo * std::exp(step * i);
    t.back() = hi;
    return t;
}

void finish_series(BoundRatioSeries& s, double horizon, double stab_tol) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        s.sup = std::max(s.sup, s.ratios[i]);
        if (s.times[i] >= horizon / 10.0) {
            lo = std::min(lo, s.ratios[i]);
            hi = std::max(hi, s.ratios[i]);
        }
    }
    s.last_decade_variation = hi > 0.0 ? (hi - lo) / hi : 0.0;
    s.stabilized = std::isfinite(s.sup) && s.last_decade_variation < stab_tol;
}

// Piecewise log-log interpolation table for the inner singular integral
// h(tau) = int_0^tau (tau-s)^(-gamma) (1+s)^(-beta) ds.
class InnerIntegralTable {
public:
    InnerIntegralTable(double beta, double gamma, double tau_max, int per_decade)
        : gamma_(gamma) {
        tau_ = log_spaced(1e-6, tau_max, std::max(per_decade / 4, 64));
        h_.resize(tau_.size());
        for (std::size_t i = 0; i < tau_.size(); ++i)
            h_[i] = evaluate(beta, gamma, tau_[i], per_decade);
    }

    double operator()(double tau) const {
        if (tau <= 0.0) return 0.0;
        if (tau <= tau_.front())  // small-tau asymptote h ~ tau^(1-gamma)/(1-gamma)
            return h_.front() * std::pow(tau / tau_.front(), 1.0 - gamma_);
        const auto it = std::lower_bound(tau_.begin(), tau_.end(), tau);
        const std::size_t k = std::min(static_cast<std::size_t>(it - tau_.begin()),
                                       tau_.size() - 1);
        const double x0 = std::log(tau_[k - 1]), x1 = std::log(tau_[k]);
        const double y0 = std::log(h_[k - 1]), y1 = std::log(h_[k]);
        const double w = (std::log(tau) - x0) / (x1 - x0);
        return std::exp(y0 + w * (y1 - y0));
    }

private:
    static double evaluate(double beta, double gamma, double tau, int per_decade) {
        // Nodes log-spaced in 1+s, plus a cluster near the kernel singularity.
        std::vector<double> s;
        const double decades = std::log10(1.0 + tau);
        const int n1 = std::max(64, static_cast<int>(std::ceil(per_decade * decades)) + 8);
        s.reserve(n1 + 48);
        s.push_back(0.0);
        for (int i = 1; i < n1; ++i)
            s.push_back(std::expm1(std::log1p(tau) * i / (n1 - 1.0)));
        for (int i = 0; i < 40; ++i)
            s.push_back(tau * (1.0 - 0.02 * std::pow(0.6, i)));
        s.push_back(tau);
        std::sort(s.begin(), s.end());
        std::vector<double> nodes;
        nodes.reserve(s.size());
        nodes.push_back(s.front());
        for (double v : s) {
            const double tolerance = 1e-13 * std::max(tau, 1.0);
            if (v - nodes.back() > tolerance) nodes.push_back(std::min(v, tau));
        }
        if (nodes.back() != tau) nodes.push_back(tau);
        std::vector<double> g(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i)
            g[i] = std::pow(1.0 + nodes[i], -beta);
        return fractional_integral_nonuniform(gamma, nodes, g, tau);
    }

    double gamma_;
    std::vector<double> tau_;
    std::vector<double> h_;
};

}  // namespace

DecayFit fit_decay_rate(std::span<const double> times, std::span<const double> values,
                        double t_lo, double t_hi) {
    if (times.size() != values.size())
        throw std::invalid_argument("times and values must have equal length");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_lo || times[i] > t_hi) continue;
        if (!(values[i] > 0.0))
            throw std::invalid_argument("fit window contains nonpositive values");
        x.push_back(std::log1p(times[i]));
        y.push_back(std::log(values[i]));
    }
    if (x.size() < 10)
        throw std::invalid_argument("fit window must contain at least 10 samples");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    const double n = static_cast<double>(x.size());
    DecayFit fit;
    fit.samples = x.size();
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

BoundRatioSeries exp_convolution_bound(double c, double alpha, double horizon,
                                       int resolution, double stabilization_tol) {
    if (!(c > 0.0)) throw std::invalid_argument("decay rate c must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");

    BoundRatioSeries out;
    out.times = log_spaced(std::min(0.01, horizon / 10.0), horizon, 20);
    out.ratios.reserve(out.times.size());
    for (double t : out.times) {
        const double reach = std::min(t, 60.0 / c);
        const int panels = std::max(24, static_cast<int>(std::ceil(1.5 * c * reach)));
        const auto f = [&](double x) {
            return std::exp(-c * x) * std::pow(1.0 + t - x, -alpha);
        };
        double integral = 0.0;
        for (int k = 0; k < panels; ++k)
            integral += gl_panel(f, reach * k / panels, reach * (k + 1) / panels);
        out.ratios.push_back(std::pow(1.0 + t, alpha) * integral);
    }
    (void)resolution;
    finish_series(out, horizon, stabilization_tol);
    return out;
}

BoundRatioSeries singular_convolution_bound(double c, double beta, double gamma,
                                            double horizon, int resolution,
                                            double bound_exponent_override,
                                            double stabilization_tol) {
    if (!(c > 0.0)) throw std::invalid_argument("decay rate c must be positive");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (std::abs(beta - 1.0) < 1e-9)
        throw std::invalid_argument(
            "beta = 1 is outside the certified cases (no bound is stated there)");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("memory exponent must lie in (0,1)");
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");

    const double bound_exponent =
        std::isfinite(bound_exponent_override)
            ? bound_exponent_override
            : (beta > 1.0 ? -gamma : 1.0 - gamma - beta);

    const InnerIntegralTable h(beta, gamma, horizon, resolution);

    BoundRatioSeries out;
    out.times = log_spaced(std::min(0.01, horizon / 10.0), horizon, 20);
    out.ratios.reserve(out.times.size());
    for (double t : out.times) {
        const double reach = std::min(t, 60.0 / c);
        const double lo = t - reach;
        const auto f = [&](double tau) { return std::exp(-c * (t - tau)) * h(tau); };
        double integral = 0.0;
        if (lo > 0.0) {
            const int panels = std::max(24, static_cast<int>(std::ceil(1.5 * c * reach)));
            for (int k = 0; k < panels; ++k)
                integral += gl_panel(f, lo + reach * k / panels, lo + reach * (k + 1) / panels);
        } else {
            // quadratic grading toward tau = 0 where h has a singular derivative
            const int panels = std::max(32, static_cast<int>(std::ceil(1.5 * c * reach)));
            for (int k = 0; k < panels; ++k) {
                const double a = t * std::pow(static_cast<double>(k) / panels, 2.0);
                const double b = t * std::pow((k + 1.0) / panels, 2.0);
                integral += gl_panel(f, a, b);
            }
        }
        out.ratios.push_back(integral / std::pow(1.0 + t, bound_exponent));
    }
    finish_series(out, horizon, stabilization_tol);
    return out;
}

GnCheckResult gn_interpolation_check(int dim, int modes, double box_length,
                                     double lebesgue_exponent, double order,
                                     int samples, std::uint64_t seed) {
    const GnTheta theta = gn_theta(dim, order, lebesgue_exponent);
    if (!theta.within_unit_interval)
        throw std::invalid_argument("interpolation exponent lies outside [0,1]");
    if (samples < 1) throw std::invalid_argument("need at least one sample");

    auto grid = TorusGrid::make(dim, box_length, modes);
    auto fine = TorusGrid::make(dim, box_length, 2 * modes);
    std::mt19937_64 rng(seed);
    // |y|^q of a band-limited field spreads to q times the band; keep the
    // band narrow enough that the coarse L^q quadrature resolves it.
    const int band = modes / 8;

    GnCheckResult res;
    res.theta = theta.value;
    auto ratio_of = [&](const Field& y) {
        const double l2 = l2_norm(y);
        if (!(l2 > 0.0)) return -1.0;
        const double hs = l2_norm(half_power_laplacian(y, order));
        const double lq = lq_norm(y, lebesgue_exponent);
        return lq / (std::pow(hs, theta.value) * std::pow(l2, 1.0 - theta.value));
    };

    for (int s = 0; s < samples; ++s) {
        Field y = random_band_limited(grid, band, rng);
        const double r = ratio_of(y);
        if (r < 0.0) continue;  // zero draw, skipped
        res.max_ratio = std::max(res.max_ratio, r);
        ++res.samples_used;

        if (s < 8) {
            for (double lambda : {1.73e-3, 9.1, 4.2e4}) {
                Field scaled = axpby(lambda, y, 0.0, y);
                const double rs = ratio_of(scaled);
                res.scale_invariance_gap =
                    std::max(res.scale_invariance_gap, std::abs(rs - r) / r);
            }
            const Field refined = inject_modes(y, fine);
            const double rf = ratio_of(refined);
            res.refinement_gap = std::max(res.refinement_gap, std::abs(rf - r) / r);
        }
    }
    return res;
}

DecayReport make_decay_report(const Trajectory& traj, double gamma, double t_lo,
                              double t_hi, double slope_tolerance, double anchor_time) {
    DecayReport rep;
    rep.window_lo = t_lo;
    rep.window_hi = t_hi;
    rep.target = -gamma;
    rep.slope_tolerance = slope_tolerance;
    rep.u_fit = fit_decay_rate(traj.times, traj.l2_u, t_lo, t_hi);
    rep.gradient_fit = fit_decay_rate(traj.times, traj.hsigma_u, t_lo, t_hi);
    rep.velocity_fit = fit_decay_rate(traj.times, traj.l2_ut, t_lo, t_hi);
    rep.u_compliant = std::abs(rep.u_fit.slope - rep.target) <= slope_tolerance;
    rep.gradient_compliant =
        std::abs(rep.gradient_fit.slope - rep.target) <= slope_tolerance;
    rep.velocity_compliant =
        std::abs(rep.velocity_fit.slope - rep.target) <= slope_tolerance;

    // Weighted sum relative to the anchor sample.
    rep.weighted_anchor_time = anchor_time;
    std::size_t anchor = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double d = std::abs(traj.times[i] - anchor_time);
        if (d < best) {
            best = d;
            anchor = i;
        }
    }
    auto weighted = [&](std::size_t i) {
        return std::pow(1.0 + traj.times[i], gamma) *
               (traj.l2_u[i] + traj.hsigma_u[i] + traj.l2_ut[i]);
    };
    const double base = weighted(anchor);
    if (base > 0.0) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t i = anchor; i < traj.size(); ++i) {
            const double r = weighted(i) / base;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        rep.weighted_ratio_min = lo;
        rep.weighted_ratio_max = hi;
    }
    return rep;
}

}  // namespace fracmem
