#include "fracmem/params.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fracmem/logging.hpp"

namespace fracmem {

namespace {

constexpr double kBoundaryTol = 1e-12;

[[noreturn]] void reject(const char* field, const char* requirement, double got) {
    std::ostringstream os;
    os << field << " " << requirement << " (got " << got << ")";
    throw std::invalid_argument(os.str());
}

}  // namespace

bool boundary_le(double a, double b) {
    return a <= b + kBoundaryTol * std::max(std::abs(a), std::abs(b));
}

bool boundary_lt(double a, double b) {
    return a < b - kBoundaryTol * std::max(std::abs(a), std::abs(b));
}

ModelParams validate_params(double damping, double mass, double memory_exponent,
                            double power, double laplacian_order, int dim) {
    if (!(damping > 0.0)) reject("damping", "must be positive", damping);
    if (!(mass > 0.0)) reject("mass", "must be positive", mass);
    if (!(memory_exponent > 0.0 && memory_exponent < 1.0))
        reject("memory_exponent", "must lie in (0,1)", memory_exponent);
    if (!(power > 1.0)) reject("power", "must exceed 1", power);
    if (!(laplacian_order > 0.0)) reject("laplacian_order", "must be positive", laplacian_order);
    if (dim < 1) reject("dim", "must be a positive integer", dim);

    ModelParams p;
    p.damping = damping;
    p.mass = mass;
    p.memory_exponent = memory_exponent;
    p.power = power;
    p.laplacian_order = laplacian_order;
    p.dim = dim;
    p.below_unit_order = laplacian_order < 1.0;
    if (p.below_unit_order) {
        log::warn("laplacian_order < 1: linear estimates still hold, but the "
                  "global-existence statement assumes order >= 1");
    }

    const AdmissibleRange window =
        admissible_exponent_interval(dim, laplacian_order, memory_exponent);
    const bool above = boundary_lt(window.lower, power);
    const bool below = window.unbounded || boundary_le(power, window.upper);
    p.theorem_compliant = !window.empty && above && below;
    return p;
}

AdmissibleRange admissible_exponent_interval(int dim, double laplacian_order,
                                             double memory_exponent) {
    if (dim < 1) reject("dim", "must be a positive integer", dim);
    if (!(laplacian_order > 0.0)) reject("laplacian_order", "must be positive", laplacian_order);
    if (!(memory_exponent > 0.0 && memory_exponent < 1.0))
        reject("memory_exponent", "must lie in (0,1)", memory_exponent);

    const double n = static_cast<double>(dim);
    AdmissibleRange r;
    r.lower = std::max(1.0, 1.0 / memory_exponent);
    if (n > 2.0 * laplacian_order) {
        r.upper = n / (n - 2.0 * laplacian_order);
        r.unbounded = false;
        r.empty = !boundary_lt(r.lower, r.upper);
    } else {
        r.upper = std::numeric_limits<double>::infinity();
        r.unbounded = true;
        r.empty = false;
    }
    return r;
}

double linear_decay_rate(double damping, double mass) {
    if (!(damping > 0.0)) reject("damping", "must be positive", damping);
    if (!(mass > 0.0)) reject("mass", "must be positive", mass);
    const double disc = damping * damping - mass * mass;
    return damping - std::sqrt(std::max(disc, 0.0));
}

GnTheta gn_theta(int dim, double laplacian_order, double lebesgue_exponent) {
    if (!(lebesgue_exponent > 1.0))
        reject("lebesgue_exponent", "must exceed 1", lebesgue_exponent);
    if (!(laplacian_order > 0.0)) reject("laplacian_order", "must be positive", laplacian_order);
    if (dim < 1) reject("dim", "must be a positive integer", dim);

    GnTheta t;
    t.value = (static_cast<double>(dim) / laplacian_order) *
              (0.5 - 1.0 / lebesgue_exponent);
    t.within_unit_interval = t.value >= -kBoundaryTol && boundary_le(t.value, 1.0);
    return t;
}

}  // namespace fracmem
