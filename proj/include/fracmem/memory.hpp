#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fracmem/field.hpp"

namespace fracmem {

/// Quadrature weights for the weakly singular convolution
///   int_0^{t_j} (t_j - s)^(-gamma) g(s) ds,  t_j = j * dt,
/// exact for piecewise-linear g on the uniform step grid. The hat-function
/// integrals are evaluated in closed form, so the endpoint weights stay
/// finite despite the kernel singularity at s = t_j. Interior weights
/// depend only on the lag j - k, which keeps lookup O(1).
class ProductIntegrationWeights {
public:
    ProductIntegrationWeights(double gamma, double dt);

    double gamma() const { return gamma_; }
    double dt() const { return dt_; }

    /// w_{j,j}: dt^(1-gamma) / ((1-gamma)(2-gamma)).
    double endpoint() const { return endpoint_; }
    /// w_{j,0} for j >= 1.
    double first(std::size_t j) const;
    /// w_{j,k} for 1 <= k <= j-1, as a function of the lag j - k.
    double interior(std::size_t lag) const;
    /// Full row w_{j,0..j}.
    std::vector<double> row(std::size_t j) const;
    /// sum_k w_{j,k} = t_j^(1-gamma) / (1-gamma).
    double total(std::size_t j) const;

    /// Extends the cached lag table; called automatically on access.
    void reserve(std::size_t max_lag) const;

private:
    double segment_flat(std::size_t r) const;   // int over [(r-1)dt, r dt] of tau^-g
    double segment_ramp(std::size_t r) const;   // same against tau/dt

    double gamma_;
    double dt_;
    double endpoint_;
    mutable std::vector<double> interior_;  // interior_[lag-1]
};

/// Row w_{j,0..j} of the product-integration weights.
std::vector<double> product_integration_weights(double gamma, double dt, std::size_t j);

/// Stored nonlinearity samples g_j (physical representation) plus the
/// weight cache, enough to evaluate the memory convolution at any step
/// reached so far. Appends are single-writer; evaluation is read-only.
class MemoryHistory {
public:
    static constexpr std::size_t default_budget = std::size_t{1} << 26;

    MemoryHistory(std::shared_ptr<const TorusGrid> grid, double gamma, double dt,
                  std::size_t budget_entries = default_budget);

    double gamma() const { return weights_.gamma(); }
    double dt() const { return weights_.dt(); }
    std::size_t size() const { return samples_.size(); }
    const std::shared_ptr<const TorusGrid>& grid_ptr() const { return grid_; }
    const ProductIntegrationWeights& weights() const { return weights_; }

    /// Stores g_j for the next step index; throws when the configured
    /// sample budget would be exceeded (reduce the horizon or the grid).
    void append(std::vector<double> sample);

    const std::vector<double>& sample(std::size_t j) const { return samples_[j]; }

    /// sum_{k<=j} w_{j,k} g_k, pointwise over the grid.
    std::vector<double> evaluate(std::size_t j) const;
    /// sum_{k<j} w_{j,k} g_k: the convolution without its endpoint sample,
    /// so a provisional g_j can be applied as prefix + endpoint() * g_j.
    std::vector<double> weighted_prefix(std::size_t j) const;

private:
    std::shared_ptr<const TorusGrid> grid_;
    ProductIntegrationWeights weights_;
    std::size_t budget_;
    std::vector<std::vector<double>> samples_;
};

/// Memory convolution at step j as a Field.
Field evaluate_memory_integral(const MemoryHistory& history, std::size_t j);

/// Product integration of int_0^tau (tau - s)^(-gamma) g(s) ds on an
/// arbitrary ascending node set with nodes.front() >= 0 and
/// nodes.back() == tau; g is interpolated linearly between nodes and the
/// kernel integrated exactly on each segment.
double fractional_integral_nonuniform(double gamma, std::span<const double> nodes,
                                      std::span<const double> values, double tau);

/// Least-squares slope of log(error) versus log(dt) for the uniform-grid
/// product integration against a reference value at fixed t.
struct OrderProbe {
    double order = 0.0;
    double fit_residual = 0.0;
    std::vector<double> dts;
    std::vector<double> errors;
    bool errors_at_roundoff = false;  ///< all errors at machine level, no slope
};

OrderProbe convergence_order_probe(double gamma, const std::function<double(double)>& g,
                                   double exact_value, double t,
                                   std::span<const double> dts);

}  // namespace fracmem
