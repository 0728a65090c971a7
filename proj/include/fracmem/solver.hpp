#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>

#include "fracmem/field.hpp"
#include "fracmem/memory.hpp"
#include "fracmem/params.hpp"
#include "fracmem/propagator.hpp"

namespace fracmem {

struct SolverConfig {
    double dt = 0.02;
    double horizon = 10.0;  ///< T
    /// Initial-data amplitude: data is rescaled so the combined norm
    /// |u0|_{H^sigma} + |u1|_{L^2} equals epsilon exactly.
    double epsilon = 1e-3;
    double blowup_threshold = 100.0;  ///< growth factor on the initial L^2 norm
    int corrector_passes = 1;
    int sample_every = 1;
    std::size_t history_budget = MemoryHistory::default_budget;
    /// Test hook: with the memory forcing off the stepper reduces to the
    /// exact linear propagator.
    bool memory_forcing_enabled = true;
    /// Test hook: additional physical-space forcing f(t), added to the
    /// memory convolution before the inner Duhamel rule.
    std::function<std::vector<double>(double)> extra_forcing;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> l2_u;      ///< |u|_{L^2}
    std::vector<double> hsigma_u;  ///< |(-Lap)^{sigma/2} u|_{L^2}
    std::vector<double> l2_ut;     ///< |du/dt|_{L^2}
    std::size_t size() const { return times.size(); }
};

enum class Verdict { global_looking, growth, overflow };
const char* verdict_name(Verdict v);

struct SimState {
    double t = 0.0;
    std::size_t step = 0;
    Field u;
    Field ut;
};

struct RunReport {
    Trajectory trajectory;
    bool overflowed = false;
    double overflow_time = std::numeric_limits<double>::quiet_NaN();
    SimState final_state;  ///< last finite state
};

/// Time integration of the full problem: exact linear propagation per step
/// plus the two-point inner Duhamel rule for the memory forcing, with a
/// linear-extrapolation predictor for the new endpoint sample and a
/// configurable number of corrector passes.
class Simulator {
public:
    Simulator(std::shared_ptr<const TorusGrid> grid, ModelParams params,
              SolverConfig config);

    const PropagatorTable& table() const { return table_; }
    const ModelParams& params() const { return params_; }
    const SolverConfig& config() const { return config_; }
    const MemoryHistory& history() const { return history_; }

    /// Resets time, states and history. Fields must live on the grid.
    void initialize(const Field& u0, const Field& u1);

    /// Advances one step. Returns false (leaving the last finite state in
    /// place) when the new state contains NaN or Inf.
    bool step();

    double time() const { return t_; }
    std::size_t step_index() const { return step_; }
    std::array<double, 3> diagnostics() const;  // l2_u, hsigma_u, l2_ut
    SimState snapshot() const;

    /// Runs from the given data to the horizon, sampling diagnostics every
    /// sample_every steps. per_step, when set, fires after each accepted step.
    RunReport run(const Field& u0, const Field& u1,
                  const std::function<void(const Simulator&)>& per_step = {});

private:
    std::vector<double> nonlinearity(const std::vector<std::complex<double>>& uh) const;
    void forcing_to_spectral(const std::vector<double>& phys,
                             std::vector<std::complex<double>>& out) const;

    std::shared_ptr<const TorusGrid> grid_;
    ModelParams params_;
    SolverConfig config_;
    PropagatorTable table_;
    std::vector<double> hsigma_symbol_;  // |xi|^(2 sigma)
    MemoryHistory history_;

    double t_ = 0.0;
    std::size_t step_ = 0;
    std::vector<std::complex<double>> uh_, vh_, prev_uh_;
    std::vector<double> forcing_now_;  // memory convolution at the current step
    bool have_prev_ = false;
};

/// sup over samples of (1+t)^gamma (|u| + |(-Lap)^{sigma/2}u| + |du/dt|),
/// the weighted solution norm of the global-existence argument.
double weighted_sup_norm(const Trajectory& traj, double gamma);

/// Heuristic classification of a finished trajectory. "growth" and
/// "global_looking" make no claim beyond the tested horizon.
Verdict detect_blow_up(const Trajectory& traj, double threshold);

struct PicardReport {
    Trajectory trajectory;
    std::vector<double> update_norms;         ///< per-iteration |u_{k+1}-u_k| in the weighted norm
    std::vector<double> contraction_factors;  ///< successive update-norm ratios
    bool converged = false;
    bool non_contraction = false;  ///< factor >= 1 three times in a row
    int iterations = 0;
    /// |S(u) - u| of the returned iterate in the weighted norm.
    double residual_norm = std::numeric_limits<double>::quiet_NaN();
};

/// Independent fixed-point oracle on the mild-solution form: iterates
/// u_{k+1} = linear part + memory operator applied to u_k over the whole
/// time grid until the weighted-norm update drops below tol. Shares the
/// kernel and quadrature conventions with the stepper, so the two agree at
/// the discrete fixed point.
PicardReport picard_iterate(const Field& u0, const Field& u1, const ModelParams& params,
                            const SolverConfig& config, double tol, int max_iter);

}  // namespace fracmem
