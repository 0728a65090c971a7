#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fracmem/solver.hpp"

namespace fracmem {

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  ///< root-mean-square log residual
    std::size_t samples = 0;
};

/// Least-squares slope of log(value) against log(1+t) over [t_lo, t_hi].
/// Requires at least 10 samples in the window, all positive.
DecayFit fit_decay_rate(std::span<const double> times, std::span<const double> values,
                        double t_lo, double t_hi);

/// Ratio series R(t) on a log-spaced grid, its sup, and a stabilization
/// verdict: relative variation (max-min)/max over the last decade of t.
struct BoundRatioSeries {
    std::vector<double> times;
    std::vector<double> ratios;
    double sup = 0.0;
    double last_decade_variation = 0.0;
    bool stabilized = false;
};

/// Certifies int_0^t exp(-c(t-s)) (1+s)^(-alpha) ds <= C (1+t)^(-alpha) by
/// evaluating R(t) = (1+t)^alpha * integral numerically up to horizon T.
BoundRatioSeries exp_convolution_bound(double c, double alpha, double horizon,
                                       int resolution = 512,
                                       double stabilization_tol = 0.05);

/// Certifies the double integral
///   D(t) = int_0^t exp(-c(t-tau)) int_0^tau (tau-s)^(-gamma) (1+s)^(-beta) ds dtau
/// against its decay bound: (1+t)^(-gamma) for beta > 1 and
/// (1+t)^(1-gamma-beta) for beta < 1. beta = 1 is rejected. The inner
/// weakly singular integral reuses the product-integration quadrature on a
/// graded node set with at least `resolution` nodes per decade.
/// bound_exponent_override, when finite, replaces the bound exponent
/// (testing hook for deliberately wrong bounds).
BoundRatioSeries singular_convolution_bound(
    double c, double beta, double gamma, double horizon, int resolution = 512,
    double bound_exponent_override = std::numeric_limits<double>::quiet_NaN(),
    double stabilization_tol = 0.05);

/// Empirical Gagliardo-Nirenberg check over random band-limited fields:
///   |y|_{L^q} <= C |(-Lap)^{sigma/2} y|^theta |y|_{L^2}^(1-theta),
/// theta = (n/sigma)(1/2 - 1/q). Returns the largest observed ratio, the
/// worst relative drift of the ratio under amplitude scaling, and the worst
/// relative change under grid refinement (same modes on a 2N grid).
struct GnCheckResult {
    double max_ratio = 0.0;
    double scale_invariance_gap = 0.0;
    double refinement_gap = 0.0;
    double theta = 0.0;
    int samples_used = 0;
};

GnCheckResult gn_interpolation_check(int dim, int modes, double box_length,
                                     double lebesgue_exponent, double order,
                                     int samples, std::uint64_t seed);

/// Fitted slopes of the three trajectory diagnostics plus a target check
/// against -gamma and the behaviour of the weighted diagnostic sum.
struct DecayReport {
    DecayFit u_fit, gradient_fit, velocity_fit;
    double window_lo = 0.0, window_hi = 0.0;
    double target = 0.0;  ///< -gamma
    double slope_tolerance = 0.15;
    bool u_compliant = false;
    bool gradient_compliant = false;
    bool velocity_compliant = false;
    /// (1+t)^gamma weighted sum relative to its value at the anchor time.
    double weighted_anchor_time = 0.0;
    double weighted_ratio_min = 1.0;
    double weighted_ratio_max = 1.0;
};

DecayReport make_decay_report(const Trajectory& traj, double gamma, double t_lo,
                              double t_hi, double slope_tolerance = 0.15,
                              double anchor_time = 10.0);

}  // namespace fracmem
