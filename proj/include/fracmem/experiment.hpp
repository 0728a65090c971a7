#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracmem/analysis.hpp"
#include "fracmem/params.hpp"
#include "fracmem/solver.hpp"

namespace fracmem {

using ordered_json = nlohmann::ordered_json;

/// Configuration problems (bad file, bad key, bad value). The CLI maps
/// these to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Complete default configuration; every key the loader understands.
ordered_json default_config();

/// Parses a JSON config file; parse errors carry the line number.
ordered_json load_config_file(const std::filesystem::path& path);

/// Applies one "dotted.path=value" override. The value is parsed as JSON
/// when possible and taken as a string otherwise.
void apply_override(ordered_json& config, const std::string& assignment);

/// Missing keys fall back to the defaults (deep merge).
ordered_json merge_with_defaults(const ordered_json& config);

struct VerifySettings {
    double horizon = 1000.0;
    int resolution = 512;
    double stabilization_tol = 0.05;
    /// Test hook: scales the decay exponent of the singular-convolution
    /// bound; 1 means the stated bound.
    double bound_exponent_scale = 1.0;
    std::vector<double> smoothing_rates{0.5, 1.0, 2.0};     // c
    std::vector<double> weight_exponents{0.5, 1.0, 2.0};    // alpha
    std::vector<double> forcing_decays{0.5, 2.0};           // beta
    std::vector<double> memory_exponents{0.25, 0.5, 0.75};  // gamma

    struct Envelope {
        std::vector<std::pair<double, double>> damping_mass{{1.0, 2.0}, {2.0, 1.0}};
        double horizon = 20.0;
        double bound = 10.0;
        int modes = 256;
        double box_length = 64.0;
    } envelope;

    struct Gn {
        std::vector<int> dims{1, 2};
        std::vector<double> lebesgue_exponents{4.0, 6.0};
        std::vector<double> orders{1.0, 1.5};
        int samples = 100;
        int modes_1d = 256;
        int modes_2d = 64;
        double box_length = 16.0;
    } gn;
};

struct ExperimentConfig {
    ordered_json effective;  ///< full merged config, recorded in the manifest
    std::string mode = "simulate";
    std::uint64_t seed = 0;
    std::string out_dir = "out";

    ModelParams model;
    int grid_modes = 512;
    double box_length = 64.0;
    std::size_t point_budget = TorusGrid::default_point_budget;
    SolverConfig solver;

    std::string data_kind = "gaussian";
    double data_width = 1.0;

    double fit_lo = 0.0, fit_hi = 0.0;  ///< defaults to [T/5, T]
    double slope_tolerance = 0.15;
    std::string fit_input;  ///< trajectory CSV for the fit mode

    std::vector<std::string> sweep_paths;
    std::vector<std::vector<ordered_json>> sweep_values;

    VerifySettings verify;
};

/// Validates and lifts a merged JSON config into the typed form.
ExperimentConfig parse_config(const ordered_json& config);

/// Initial data per the config: a Gaussian bump with zero velocity,
/// rescaled so |u0|_{H^sigma} + |u1|_{L^2} = epsilon exactly.
std::pair<Field, Field> initial_data(const ExperimentConfig& cfg,
                                     const std::shared_ptr<const TorusGrid>& grid);

struct SimulationOutcome {
    RunReport report;
    Verdict verdict = Verdict::global_looking;
    bool has_decay_report = false;
    DecayReport decay;
    std::string fit_note;  ///< set when the decay fit was skipped
};

/// Shared simulate core without any file output.
SimulationOutcome simulate_config(const ExperimentConfig& cfg);

/// Runners behind the CLI subcommands. Outputs land in cfg.out_dir.
/// Exit codes: simulate 0 global-looking / 2 growth or overflow,
/// verify-lemmas 0 pass / 3 any failed assertion, sweep and fit 0 on
/// completion. Config errors throw ConfigError (CLI exit 1).
int run_simulate(const ExperimentConfig& cfg);
int run_verify_lemmas(const ExperimentConfig& cfg);
int run_sweep(const ExperimentConfig& cfg, int workers);
int run_fit(const ExperimentConfig& cfg);

/// 17-significant-digit, locale-independent number formatting used for all
/// CSV output (round-trip exact for doubles).
std::string csv_number(double v);

/// Trajectory CSV with columns t, l2_u, hsigma_u, l2_ut, weighted_sum.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          double gamma);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

ordered_json decay_report_json(const DecayReport& rep);

/// Versioned checkpoint dump: one JSON header line, then the raw
/// little-endian doubles of u and ut in physical representation.
void write_checkpoint(const std::filesystem::path& path, const SimState& state,
                      const ModelParams& model);

struct Checkpoint {
    ordered_json header;
    std::vector<double> u;
    std::vector<double> ut;
};
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace fracmem
