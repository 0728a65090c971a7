#include "fracmem/memory.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fracmem {

namespace {

void check_gamma_dt(double gamma, double dt) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("memory exponent must lie in (0,1)");
    if (!(dt > 0.0)) throw std::invalid_argument("step must be positive");
}

// r^mu - (r-1)^mu without cancellation for large r.
double power_difference(double r, double mu) {
    if (r <= 1.0) return std::pow(r, mu);
    return std::pow(r, mu) * (-std::expm1(mu * std::log1p(-1.0 / r)));
}

}  // namespace

ProductIntegrationWeights::ProductIntegrationWeights(double gamma, double dt)
    : gamma_(gamma), dt_(dt) {
    check_gamma_dt(gamma, dt);
    const double mu = 1.0 - gamma_;
    endpoint_ = std::pow(dt_, mu) / (mu * (mu + 1.0));
}

double ProductIntegrationWeights::segment_flat(std::size_t r) const {
    const double mu = 1.0 - gamma_;
    return std::pow(dt_, mu) * power_difference(static_cast<double>(r), mu) / mu;
}

double ProductIntegrationWeights::segment_ramp(std::size_t r) const {
    const double mu = 1.0 - gamma_;
    return std::pow(dt_, mu) * power_difference(static_cast<double>(r), mu + 1.0) /
           (mu + 1.0);
}

void ProductIntegrationWeights::reserve(std::size_t max_lag) const {
    while (interior_.size() < max_lag) {
        const std::size_t r = interior_.size() + 1;
        const double w = segment_ramp(r) - static_cast<double>(r - 1) * segment_flat(r) +
                         static_cast<double>(r + 1) * segment_flat(r + 1) -
                         segment_ramp(r + 1);
        interior_.push_back(w);
    }
}

double ProductIntegrationWeights::first(std::size_t j) const {
    if (j < 1) throw std::invalid_argument("weights need j >= 1");
    return segment_ramp(j) - static_cast<double>(j - 1) * segment_flat(j);
}

double ProductIntegrationWeights::interior(std::size_t lag) const {
    if (lag < 1) throw std::invalid_argument("interior lag must be at least 1");
    reserve(lag);
    return interior_[lag - 1];
}

std::vector<double> ProductIntegrationWeights::row(std::size_t j) const {
    if (j < 1) throw std::invalid_argument("weights need j >= 1");
    std::vector<double> w(j + 1);
    w[0] = first(j);
    for (std::size_t k = 1; k < j; ++k) w[k] = interior(j - k);
    w[j] = endpoint_;
    return w;
}

double ProductIntegrationWeights::total(std::size_t j) const {
    const double mu = 1.0 - gamma_;
    return std::pow(static_cast<double>(j) * dt_, mu) / mu;
}

std::vector<double> product_integration_weights(double gamma, double dt, std::size_t j) {
    return ProductIntegrationWeights(gamma, dt).row(j);
}

MemoryHistory::MemoryHistory(std::shared_ptr<const TorusGrid> grid, double gamma,
                             double dt, std::size_t budget_entries)
    : grid_(std::move(grid)), weights_(gamma, dt), budget_(budget_entries) {}

void MemoryHistory::append(std::vector<double> sample) {
    if (sample.size() != grid_->num_points())
        throw std::invalid_argument("memory sample size does not match the grid");
    const std::size_t next = (samples_.size() + 1) * grid_->num_points();
    if (next > budget_) {
        std::ostringstream os;
        os << "memory history budget exceeded (" << next << " > " << budget_
           << " entries); reduce the horizon, enlarge the step, or coarsen the grid";
        throw std::runtime_error(os.str());
    }
    samples_.push_back(std::move(sample));
}

std::vector<double> MemoryHistory::weighted_prefix(std::size_t j) const {
    if (j >= samples_.size() + 1)
        throw std::out_of_range("memory history is missing samples for this step");
    const std::size_t n = grid_->num_points();
    std::vector<double> acc(n, 0.0);
    if (j == 0) return acc;
    weights_.reserve(j);

    const double w0 = weights_.first(j);
    const auto& g0 = samples_[0];
    for (std::size_t i = 0; i < n; ++i) acc[i] = w0 * g0[i];
    for (std::size_t k = 1; k < j; ++k) {
        const double w = weights_.interior(j - k);
        const auto& g = samples_[k];
        for (std::size_t i = 0; i < n; ++i) acc[i] += w * g[i];
    }
    return acc;
}

std::vector<double> MemoryHistory::evaluate(std::size_t j) const {
    if (j >= samples_.size())
        throw std::out_of_range("memory history is missing samples for this step");
    std::vector<double> acc = weighted_prefix(j);
    if (j == 0) return acc;  // the convolution over an empty interval vanishes
    const double we = weights_.endpoint();
    const auto& g = samples_[j];
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += we * g[i];
    return acc;
}

Field evaluate_memory_integral(const MemoryHistory& history, std::size_t j) {
    return Field::from_physical(history.grid_ptr(), history.evaluate(j));
}

double fractional_integral_nonuniform(double gamma, std::span<const double> nodes,
                                      std::span<const double> values, double tau) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("memory exponent must lie in (0,1)");
    if (nodes.size() != values.size() || nodes.size() < 2)
        throw std::invalid_argument("need matching node and value arrays of size >= 2");
    if (!(nodes.front() >= 0.0) || nodes.back() != tau)
        throw std::invalid_argument("nodes must start at >= 0 and end exactly at tau");

    const double mu = 1.0 - gamma;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double ds = nodes[i + 1] - nodes[i];
        if (!(ds > 0.0)) throw std::invalid_argument("nodes must be strictly ascending");
        const double u_hi = tau - nodes[i];      // kernel argument, larger end
        const double u_lo = tau - nodes[i + 1];  // zero on the final segment
        const double flat = (std::pow(u_hi, mu) - std::pow(u_lo, mu)) / mu;
        const double ramp =
            (std::pow(u_hi, mu + 1.0) - std::pow(u_lo, mu + 1.0)) / (mu + 1.0);
        // linear interpolant in terms of u = tau - s
        const double w_left = (ramp - u_lo * flat) / ds;
        const double w_right = (u_hi * flat - ramp) / ds;
        acc += w_left * values[i] + w_right * values[i + 1];
    }
    return acc;
}

OrderProbe convergence_order_probe(double gamma, const std::function<double(double)>& g,
                                   double exact_value, double t,
                                   std::span<const double> dts) {
    if (!(t > 0.0)) throw std::invalid_argument("probe time must be positive");
    OrderProbe probe;
    for (double dt : dts) {
        const auto j = static_cast<std::size_t>(std::llround(t / dt));
        if (j < 1 || std::abs(j * dt - t) > 1e-9 * t)
            throw std::invalid_argument("probe steps must divide the probe time");
        const std::vector<double> w = product_integration_weights(gamma, dt, j);
        double acc = 0.0;
        for (std::size_t k = 0; k <= j; ++k) acc += w[k] * g(k * dt);
        probe.dts.push_back(dt);
        probe.errors.push_back(std::abs(acc - exact_value));
    }

    const double floor = 1e-14 * std::max(std::abs(exact_value), 1.0);
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < probe.dts.size(); ++i) {
        if (probe.errors[i] > floor) {
            lx.push_back(std::log(probe.dts[i]));
            ly.push_back(std::log(probe.errors[i]));
        }
    }
    if (lx.size() < 2) {
        probe.errors_at_roundoff = true;
        return probe;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i]; sy += ly[i]; sxx += lx[i] * lx[i]; sxy += lx[i] * ly[i];
    }
    const double n = static_cast<double>(lx.size());
    probe.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - probe.order * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (intercept + probe.order * lx[i]);
        ss += r * r;
    }
    probe.fit_residual = std::sqrt(ss / n);
    return probe;
}

}  // namespace fracmem
