#include "fracmem/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace fracmem {

Field to_spectral(Field f) {
    f.ensure_spectral();
    return f;
}

Field to_physical(Field f) {
    f.ensure_physical();
    return f;
}

Field apply_symbol(const Field& f, const std::vector<double>& symbol) {
    if (symbol.size() != f.grid().num_points())
        throw std::invalid_argument("symbol size does not match the grid");
    Field g = to_spectral(f);
    auto& c = g.mutable_spectral();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= symbol[i];
    return g;
}

Field fractional_laplacian(const Field& f, double order) {
    if (!(order > 0.0)) throw std::invalid_argument("laplacian order must be positive");
    return apply_symbol(f, f.grid().symbol(order));
}

Field half_power_laplacian(const Field& f, double order) {
    if (!(order > 0.0)) throw std::invalid_argument("laplacian order must be positive");
    return apply_symbol(f, f.grid().symbol(0.5 * order));
}

Field dealias(Field f) {
    f.ensure_spectral();
    const auto& keep = f.grid().dealias_keep();
    auto& c = f.mutable_spectral();
    for (std::size_t i = 0; i < c.size(); ++i)
        if (!keep[i]) c[i] = {0.0, 0.0};
    return f;
}

Field pointwise_power_abs(const Field& f, double power) {
    if (!(power > 1.0)) throw std::invalid_argument("power must exceed 1");
    Field g = to_physical(f);
    auto& v = g.mutable_physical();
    for (double& x : v) x = std::pow(std::abs(x), power);
    return dealias(std::move(g));
}

double l2_norm(const Field& f) {
    if (f.has_physical()) {
        double s = 0.0;
        for (double x : f.physical()) s += x * x;
        return std::sqrt(s * f.grid().cell_volume());
    }
    return spectral_l2_norm(f);
}

double spectral_l2_norm(const Field& f) {
    const auto& c = f.spectral();
    double s = 0.0;
    for (const auto& z : c) s += std::norm(z);
    return std::sqrt(s * f.grid().box_volume());
}

double lq_norm(const Field& f, double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("lq_norm requires q >= 1");
    const Field g = to_physical(f);
    const auto& v = g.physical();
    double s = 0.0;
    for (double x : v) s += std::pow(std::abs(x), q);
    return std::pow(s * f.grid().cell_volume(), 1.0 / q);
}

double sobolev_norm(const Field& f, double index) {
    Field g = to_spectral(f);
    const auto& c = g.spectral();
    const auto& xi2 = g.grid().xi_squared();
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        s += std::pow(1.0 + xi2[i], index) * std::norm(c[i]);
    return std::sqrt(s * g.grid().box_volume());
}

Field axpby(double a, const Field& x, double b, const Field& y) {
    require_same_grid(x, y);
    Field xs = to_spectral(x);
    const Field ys = to_spectral(y);
    auto& c = xs.mutable_spectral();
    const auto& d = ys.spectral();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a * c[i] + b * d[i];
    return xs;
}

Field gaussian_bump(std::shared_ptr<const TorusGrid> grid, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("gaussian width must be positive");
    const std::size_t n = grid->num_points();
    std::vector<double> v(n);
    const double inv = 1.0 / (2.0 * width * width);
    for (std::size_t i = 0; i < n; ++i) {
        double r2 = 0.0;
        for (int a = 0; a < grid->dim(); ++a) {
            const double x = grid->coordinate(i, a);
            r2 += x * x;
        }
        v[i] = std::exp(-r2 * inv);
    }
    return Field::from_physical(std::move(grid), std::move(v));
}

Field random_band_limited(std::shared_ptr<const TorusGrid> grid, int max_mode,
                          std::mt19937_64& rng) {
    const std::size_t n = grid->num_points();
    const int N = grid->modes_per_axis();
    std::vector<std::complex<double>> c(n, {0.0, 0.0});
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    // Hermitian symmetry: pair each mode with its negation and assign the
    // conjugate pair once, from the lexicographically smaller index.
    std::vector<std::size_t> stride(grid->dim());
    stride[grid->dim() - 1] = 1;
    for (int a = grid->dim() - 2; a >= 0; --a)
        stride[a] = stride[a + 1] * static_cast<std::size_t>(N);

    for (std::size_t i = 0; i < n; ++i) {
        bool in_band = true;
        std::size_t partner = 0;
        bool self_conjugate = true;
        for (int a = 0; a < grid->dim(); ++a) {
            const int k = grid->mode_number(i, a);
            if (std::abs(k) > max_mode) in_band = false;
            const int idx = static_cast<int>((i / stride[a]) % static_cast<std::size_t>(N));
            const int nidx = (N - idx) % N;
            partner += static_cast<std::size_t>(nidx) * stride[a];
            if (nidx != idx) self_conjugate = false;
        }
        if (!in_band || partner < i) continue;
        if (self_conjugate) {
            c[i] = {unit(rng), 0.0};
        } else {
            c[i] = {unit(rng), unit(rng)};
            c[partner] = std::conj(c[i]);
        }
    }
    Field f = Field::from_spectral(std::move(grid), std::move(c));
    f.ensure_physical();
    return f;
}

Field inject_modes(const Field& f, std::shared_ptr<const TorusGrid> finer) {
    const TorusGrid& coarse = f.grid();
    if (finer->dim() != coarse.dim() || finer->box_length() != coarse.box_length())
        throw std::invalid_argument("inject_modes requires the same box and dimension");
    if (finer->modes_per_axis() < coarse.modes_per_axis())
        throw std::invalid_argument("target grid must be at least as fine");

    const Field fs = to_spectral(f);
    const int Nc = coarse.modes_per_axis();
    const int Nf = finer->modes_per_axis();
    const int d = coarse.dim();

    std::vector<std::size_t> stride_f(d);
    stride_f[d - 1] = 1;
    for (int a = d - 2; a >= 0; --a)
        stride_f[a] = stride_f[a + 1] * static_cast<std::size_t>(Nf);

    std::vector<std::complex<double>> out(finer->num_points(), {0.0, 0.0});
    for (std::size_t i = 0; i < coarse.num_points(); ++i) {
        std::size_t j = 0;
        bool drop = false;
        for (int a = 0; a < d; ++a) {
            const int k = coarse.mode_number(i, a);
            // The coarse Nyquist mode has no unambiguous fine counterpart.
            if (k == -Nc / 2) { drop = true; break; }
            const int idx = k >= 0 ? k : k + Nf;
            j += static_cast<std::size_t>(idx) * stride_f[a];
        }
        if (!drop) out[j] = fs.spectral()[i];
    }
    Field g = Field::from_spectral(std::move(finer), std::move(out));
    g.ensure_physical();
    return g;
}

}  // namespace fracmem
