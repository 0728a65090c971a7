#pragma once

namespace fracmem {

/// Coefficients of the damped fractional Klein-Gordon equation with a
/// weakly singular memory forcing, plus the space dimension.
///
/// The model is
///   u_tt + (-Lap)^sigma u + 2a u_t + m^2 u
///       = int_0^t (t-s)^(-gamma) |u(s,x)|^p ds
/// on the n-dimensional torus. Use validate_params() to construct a checked
/// instance; the derived flags are filled in there.
struct ModelParams {
    double damping = 1.0;          ///< a > 0
    double mass = 1.0;             ///< m > 0
    double memory_exponent = 0.5;  ///< gamma in (0,1), kernel (t-s)^(-gamma)
    double power = 2.0;            ///< p > 1, exponent of |u|^p
    double laplacian_order = 1.0;  ///< sigma > 0
    int dim = 1;                   ///< n, space dimension (1..3 supported)

    /// True when p lies in the admissible small-data window, i.e. p exceeds
    /// 1/gamma and stays within the dimension-dependent upper bound.
    bool theorem_compliant = false;
    /// sigma < 1 is accepted (the linear machinery is valid for any
    /// sigma > 0) but the global-existence statement assumes sigma >= 1.
    bool below_unit_order = false;
};

/// Window of nonlinearity exponents p for which small-data global existence
/// is guaranteed: (lower, upper], with an unbounded upper end when n <= 2*sigma.
struct AdmissibleRange {
    double lower = 1.0;  ///< exclusive
    double upper = 0.0;  ///< inclusive; meaningful only when !unbounded
    bool unbounded = false;
    bool empty = false;
};

/// Validates the six scalars and fills in the derived flags.
/// Throws std::invalid_argument naming the offending field.
/// sigma < 1 is accepted with a warning, not an error.
ModelParams validate_params(double damping, double mass, double memory_exponent,
                            double power, double laplacian_order, int dim);

/// The p-window (max(1, 1/gamma), n/(n - 2*sigma)] of the global-existence
/// statement. Unbounded above when n <= 2*sigma. For n > 2*sigma the window
/// is nonempty exactly when 1 - 2*sigma/n < gamma.
AdmissibleRange admissible_exponent_interval(int dim, double laplacian_order,
                                             double memory_exponent);

/// Exponential rate a - sqrt(max(a^2 - m^2, 0)) of the linear flow.
/// Always lies in (0, a].
double linear_decay_rate(double damping, double mass);

/// Gagliardo-Nirenberg interpolation exponent theta_q = (n/sigma)(1/2 - 1/q)
/// together with the validity flag theta_q in [0, 1].
struct GnTheta {
    double value = 0.0;
    bool within_unit_interval = false;
};

GnTheta gn_theta(int dim, double laplacian_order, double lebesgue_exponent);

/// Tolerant comparisons used for the admissibility boundaries. Boundary
/// cases such as p equal to the upper endpoint are meaningful (inclusive),
/// so equality is decided up to a 1e-12 relative tolerance.
bool boundary_le(double a, double b);
bool boundary_lt(double a, double b);

}  // namespace fracmem
