#include "fracmem/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "fracmem/logging.hpp"
#include "fracmem/spectral.hpp"
#include "fracmem/version.hpp"

namespace fracmem {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_fail(const std::string& msg) { throw ConfigError(msg); }

const ordered_json& walk(const ordered_json& j, const std::string& dotted) {
    const ordered_json* cur = &j;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = dotted.find('.', start);
        const std::string key = dotted.substr(start, dot - start);
        if (!cur->is_object() || !cur->contains(key))
            config_fail("missing config key: " + dotted);
        cur = &(*cur)[key];
        if (dot == std::string::npos) return *cur;
        start = dot + 1;
    }
}

double num_at(const ordered_json& j, const std::string& path) {
    const ordered_json& v = walk(j, path);
    if (!v.is_number()) config_fail("config key " + path + " must be a number");
    return v.get<double>();
}

std::int64_t int_at(const ordered_json& j, const std::string& path) {
    const ordered_json& v = walk(j, path);
    if (!v.is_number_integer()) config_fail("config key " + path + " must be an integer");
    return v.get<std::int64_t>();
}

bool bool_at(const ordered_json& j, const std::string& path) {
    const ordered_json& v = walk(j, path);
    if (!v.is_boolean()) config_fail("config key " + path + " must be a boolean");
    return v.get<bool>();
}

std::string str_at(const ordered_json& j, const std::string& path) {
    const ordered_json& v = walk(j, path);
    if (!v.is_string()) config_fail("config key " + path + " must be a string");
    return v.get<std::string>();
}

std::vector<double> num_list_at(const ordered_json& j, const std::string& path) {
    const ordered_json& v = walk(j, path);
    if (!v.is_array()) config_fail("config key " + path + " must be an array");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) config_fail("config key " + path + " must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

void merge_into(ordered_json& base, const ordered_json& extra, const std::string& where) {
    if (!extra.is_object()) config_fail("config section " + where + " must be an object");
    for (const auto& [key, value] : extra.items()) {
        if (base.contains(key) && base[key].is_object() && value.is_object())
            merge_into(base[key], value, where.empty() ? key : where + "." + key);
        else
            base[key] = value;
    }
}

void check_known_keys(const ordered_json& config, const ordered_json& defaults,
                      const std::string& where) {
    for (const auto& [key, value] : config.items()) {
        const std::string path = where.empty() ? key : where + "." + key;
        if (path == "sweep.axes") continue;  // axis names are config paths
        if (!defaults.contains(key)) config_fail("unknown config key: " + path);
        if (value.is_object() && defaults[key].is_object())
            check_known_keys(value, defaults[key], path);
    }
}

std::string sanitize_csv(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

ordered_json manifest_json(const ExperimentConfig& cfg) {
    ordered_json m;
    m["tool"] = "fracmem";
    m["version"] = FRACMEM_VERSION;
    m["mode"] = cfg.mode;
    m["seed"] = cfg.seed;
    m["config"] = cfg.effective;
    return m;
}

void write_json_file(const fs::path& path, const ordered_json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) config_fail("cannot open for writing: " + path.string());
    out << j.dump(2) << "\n";
    if (!out) config_fail("write failed: " + path.string());
}

ordered_json fit_json(const DecayFit& f) {
    return ordered_json{{"slope", f.slope},
                        {"intercept", f.intercept},
                        {"residual", f.residual},
                        {"samples", f.samples}};
}

}  // namespace

ordered_json default_config() {
    ordered_json j;
    j["mode"] = "simulate";
    j["seed"] = 12345;
    j["model"] = {{"damping", 1.0},       {"mass", 1.0},
                  {"memory_exponent", 0.75}, {"power", 2.0},
                  {"laplacian_order", 1.0},  {"dim", 1}};
    j["grid"] = {{"modes", 512},
                 {"box_length", 64.0},
                 {"point_budget", static_cast<std::int64_t>(TorusGrid::default_point_budget)}};
    j["solver"] = {{"dt", 0.02},
                   {"horizon", 200.0},
                   {"epsilon", 1e-3},
                   {"blowup_threshold", 100.0},
                   {"corrector_passes", 1},
                   {"sample_every", 1},
                   {"checkpoint_every", 0},
                   {"history_budget", static_cast<std::int64_t>(MemoryHistory::default_budget)},
                   {"memory_forcing_enabled", true}};
    j["data"] = {{"kind", "gaussian"}, {"width", 1.0}};
    j["fit"] = {{"t_min", nullptr},
                {"t_max", nullptr},
                {"slope_tolerance", 0.15},
                {"input", ""}};
    j["sweep"] = {{"axes", ordered_json::object()}};
    j["verify"] = {{"horizon", 1000.0},
                   {"resolution", 512},
                   {"stabilization_tol", 0.05},
                   {"bound_exponent_scale", 1.0},
                   {"smoothing_rates", {0.5, 1.0, 2.0}},
                   {"weight_exponents", {0.5, 1.0, 2.0}},
                   {"forcing_decays", {0.5, 2.0}},
                   {"memory_exponents", {0.25, 0.5, 0.75}},
                   {"envelope",
                    {{"damping_mass", {{1.0, 2.0}, {2.0, 1.0}}},
                     {"horizon", 20.0},
                     {"bound", 10.0},
                     {"modes", 256},
                     {"box_length", 64.0}}},
                   {"gn",
                    {{"dims", {1, 2}},
                     {"lebesgue_exponents", {4.0, 6.0}},
                     {"orders", {1.0, 1.5}},
                     {"samples", 100},
                     {"modes_1d", 256},
                     {"modes_2d", 64},
                     {"box_length", 16.0}}}};
    j["output"] = {{"dir", "out"}};
    return j;
}

ordered_json load_config_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) config_fail("cannot read config file: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i)
            if (text[i] == '\n') ++line;
        std::ostringstream os;
        os << path.string() << ": parse error at line " << line << ": " << e.what();
        config_fail(os.str());
    }
}

void apply_override(ordered_json& config, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        config_fail("--set expects key.path=value, got: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    ordered_json value;
    try {
        value = ordered_json::parse(raw);
    } catch (const nlohmann::json::parse_error&) {
        value = raw;  // plain string
    }

    ordered_json* cur = &config;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) config_fail("--set path has an empty segment: " + path);
        if (dot == std::string::npos) {
            (*cur)[key] = value;
            return;
        }
        if (!cur->contains(key) || !(*cur)[key].is_object())
            (*cur)[key] = ordered_json::object();
        cur = &(*cur)[key];
        start = dot + 1;
    }
}

ordered_json merge_with_defaults(const ordered_json& config) {
    ordered_json merged = default_config();
    merge_into(merged, config, "");
    return merged;
}

ExperimentConfig parse_config(const ordered_json& raw) {
    ordered_json merged = merge_with_defaults(raw);
    check_known_keys(merged, default_config(), "");

    ExperimentConfig cfg;
    cfg.effective = merged;
    cfg.mode = str_at(merged, "mode");
    if (cfg.mode != "simulate" && cfg.mode != "verify-lemmas" && cfg.mode != "sweep" &&
        cfg.mode != "fit")
        config_fail("mode must be simulate, verify-lemmas, sweep or fit");

    const std::int64_t seed = int_at(merged, "seed");
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.out_dir = str_at(merged, "output.dir");

    try {
        cfg.model = validate_params(num_at(merged, "model.damping"),
                                    num_at(merged, "model.mass"),
                                    num_at(merged, "model.memory_exponent"),
                                    num_at(merged, "model.power"),
                                    num_at(merged, "model.laplacian_order"),
                                    static_cast<int>(int_at(merged, "model.dim")));
    } catch (const std::invalid_argument& e) {
        config_fail(std::string("model: ") + e.what());
    }
    if (cfg.model.dim > 3) config_fail("model.dim above 3 is not supported");

    cfg.grid_modes = static_cast<int>(int_at(merged, "grid.modes"));
    cfg.box_length = num_at(merged, "grid.box_length");
    cfg.point_budget = static_cast<std::size_t>(int_at(merged, "grid.point_budget"));

    cfg.solver.dt = num_at(merged, "solver.dt");
    cfg.solver.horizon = num_at(merged, "solver.horizon");
    cfg.solver.epsilon = num_at(merged, "solver.epsilon");
    cfg.solver.blowup_threshold = num_at(merged, "solver.blowup_threshold");
    cfg.solver.corrector_passes = static_cast<int>(int_at(merged, "solver.corrector_passes"));
    cfg.solver.sample_every = static_cast<int>(int_at(merged, "solver.sample_every"));
    cfg.solver.history_budget =
        static_cast<std::size_t>(int_at(merged, "solver.history_budget"));
    cfg.solver.memory_forcing_enabled = bool_at(merged, "solver.memory_forcing_enabled");
    if (!(cfg.solver.dt > 0.0)) config_fail("solver.dt must be positive");
    if (!(cfg.solver.horizon >= cfg.solver.dt))
        config_fail("solver.horizon must be at least solver.dt");
    if (!(cfg.solver.epsilon >= 0.0)) config_fail("solver.epsilon must be nonnegative");

    cfg.data_kind = str_at(merged, "data.kind");
    if (cfg.data_kind != "gaussian") config_fail("data.kind must be gaussian");
    cfg.data_width = num_at(merged, "data.width");
    if (!(cfg.data_width > 0.0)) config_fail("data.width must be positive");

    const ordered_json& tmin = walk(merged, "fit.t_min");
    const ordered_json& tmax = walk(merged, "fit.t_max");
    cfg.fit_lo = tmin.is_null() ? cfg.solver.horizon / 5.0 : tmin.get<double>();
    cfg.fit_hi = tmax.is_null() ? cfg.solver.horizon : tmax.get<double>();
    cfg.slope_tolerance = num_at(merged, "fit.slope_tolerance");
    cfg.fit_input = str_at(merged, "fit.input");

    const ordered_json& axes = walk(merged, "sweep.axes");
    if (!axes.is_object()) config_fail("sweep.axes must be an object");
    // Axis names are config paths; nested objects (as produced by --set
    // sweep.axes.solver.epsilon=...) flatten to the same dotted form.
    const std::function<void(const ordered_json&, const std::string&)> flatten =
        [&](const ordered_json& node, const std::string& prefix) {
            for (const auto& [key, values] : node.items()) {
                const std::string path = prefix.empty() ? key : prefix + "." + key;
                if (values.is_object()) {
                    flatten(values, path);
                } else if (values.is_array()) {
                    cfg.sweep_paths.push_back(path);
                    cfg.sweep_values.emplace_back(values.begin(), values.end());
                } else {
                    config_fail("sweep axis " + path + " must be an array");
                }
            }
        };
    flatten(axes, "");

    VerifySettings& v = cfg.verify;
    v.horizon = num_at(merged, "verify.horizon");
    v.resolution = static_cast<int>(int_at(merged, "verify.resolution"));
    v.stabilization_tol = num_at(merged, "verify.stabilization_tol");
    v.bound_exponent_scale = num_at(merged, "verify.bound_exponent_scale");
    v.smoothing_rates = num_list_at(merged, "verify.smoothing_rates");
    v.weight_exponents = num_list_at(merged, "verify.weight_exponents");
    v.forcing_decays = num_list_at(merged, "verify.forcing_decays");
    v.memory_exponents = num_list_at(merged, "verify.memory_exponents");

    const ordered_json& pairs = walk(merged, "verify.envelope.damping_mass");
    if (!pairs.is_array()) config_fail("verify.envelope.damping_mass must be an array");
    v.envelope.damping_mass.clear();
    for (const auto& pr : pairs) {
        if (!pr.is_array() || pr.size() != 2)
            config_fail("verify.envelope.damping_mass entries must be [damping, mass]");
        v.envelope.damping_mass.emplace_back(pr[0].get<double>(), pr[1].get<double>());
    }
    v.envelope.horizon = num_at(merged, "verify.envelope.horizon");
    v.envelope.bound = num_at(merged, "verify.envelope.bound");
    v.envelope.modes = static_cast<int>(int_at(merged, "verify.envelope.modes"));
    v.envelope.box_length = num_at(merged, "verify.envelope.box_length");

    v.gn.dims.clear();
    for (double d : num_list_at(merged, "verify.gn.dims"))
        v.gn.dims.push_back(static_cast<int>(d));
    v.gn.lebesgue_exponents = num_list_at(merged, "verify.gn.lebesgue_exponents");
    v.gn.orders = num_list_at(merged, "verify.gn.orders");
    v.gn.samples = static_cast<int>(int_at(merged, "verify.gn.samples"));
    v.gn.modes_1d = static_cast<int>(int_at(merged, "verify.gn.modes_1d"));
    v.gn.modes_2d = static_cast<int>(int_at(merged, "verify.gn.modes_2d"));
    v.gn.box_length = num_at(merged, "verify.gn.box_length");

    return cfg;
}

std::pair<Field, Field> initial_data(const ExperimentConfig& cfg,
                                     const std::shared_ptr<const TorusGrid>& grid) {
    Field u0 = gaussian_bump(grid, cfg.data_width);
    Field u1 = Field::zeros(grid);
    const double norm =
        sobolev_norm(u0, cfg.model.laplacian_order) + l2_norm(u1);
    const double scale = norm > 0.0 ? cfg.solver.epsilon / norm : 0.0;
    return {axpby(scale, u0, 0.0, u1), std::move(u1)};
}

SimulationOutcome simulate_config(const ExperimentConfig& cfg) {
    std::shared_ptr<const TorusGrid> grid;
    try {
        grid = TorusGrid::make(cfg.model.dim, cfg.box_length, cfg.grid_modes,
                               cfg.point_budget);
    } catch (const std::invalid_argument& e) {
        config_fail(std::string("grid: ") + e.what());
    }

    auto [u0, u1] = initial_data(cfg, grid);
    Simulator sim(grid, cfg.model, cfg.solver);

    SimulationOutcome out;
    out.report = sim.run(u0, u1);
    out.verdict = out.report.overflowed
                      ? Verdict::overflow
                      : detect_blow_up(out.report.trajectory, cfg.solver.blowup_threshold);
    try {
        out.decay = make_decay_report(out.report.trajectory, cfg.model.memory_exponent,
                                      cfg.fit_lo, cfg.fit_hi, cfg.slope_tolerance);
        out.has_decay_report = true;
    } catch (const std::invalid_argument& e) {
        out.fit_note = e.what();
    }
    return out;
}

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_trajectory_csv(const fs::path& path, const Trajectory& traj, double gamma) {
    std::ofstream out(path, std::ios::binary);
    if (!out) config_fail("cannot open for writing: " + path.string());
    out << "t,l2_u,hsigma_u,l2_ut,weighted_sum\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double w = std::pow(1.0 + traj.times[i], gamma) *
                         (traj.l2_u[i] + traj.hsigma_u[i] + traj.l2_ut[i]);
        out << csv_number(traj.times[i]) << ',' << csv_number(traj.l2_u[i]) << ','
            << csv_number(traj.hsigma_u[i]) << ',' << csv_number(traj.l2_ut[i]) << ','
            << csv_number(w) << '\n';
    }
    if (!out) config_fail("write failed: " + path.string());
}

Trajectory read_trajectory_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) config_fail("cannot read trajectory CSV: " + path.string());
    std::string header;
    if (!std::getline(in, header)) config_fail("empty trajectory CSV: " + path.string());

    std::vector<std::string> cols;
    std::stringstream hs(header);
    std::string tok;
    while (std::getline(hs, tok, ',')) cols.push_back(tok);
    auto col = [&](const std::string& name) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == name) return i;
        config_fail("trajectory CSV lacks column " + name + ": " + path.string());
    };
    const std::size_t ct = col("t"), cu = col("l2_u"), ch = col("hsigma_u"),
                      cv = col("l2_ut");

    Trajectory traj;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::vector<double> row;
        while (std::getline(ls, tok, ',')) row.push_back(std::strtod(tok.c_str(), nullptr));
        if (row.size() < cols.size()) config_fail("short CSV row in " + path.string());
        traj.times.push_back(row[ct]);
        traj.l2_u.push_back(row[cu]);
        traj.hsigma_u.push_back(row[ch]);
        traj.l2_ut.push_back(row[cv]);
    }
    return traj;
}

ordered_json decay_report_json(const DecayReport& rep) {
    ordered_json j;
    j["window"] = {rep.window_lo, rep.window_hi};
    j["target_slope"] = rep.target;
    j["slope_tolerance"] = rep.slope_tolerance;
    j["fits"] = {{"l2_u", fit_json(rep.u_fit)},
                 {"hsigma_u", fit_json(rep.gradient_fit)},
                 {"l2_ut", fit_json(rep.velocity_fit)}};
    j["compliant"] = {{"l2_u", rep.u_compliant},
                      {"hsigma_u", rep.gradient_compliant},
                      {"l2_ut", rep.velocity_compliant}};
    j["weighted_sum"] = {{"anchor_time", rep.weighted_anchor_time},
                         {"ratio_min", rep.weighted_ratio_min},
                         {"ratio_max", rep.weighted_ratio_max}};
    return j;
}

void write_checkpoint(const fs::path& path, const SimState& state,
                      const ModelParams& model) {
    Field u = to_physical(state.u);
    Field ut = to_physical(state.ut);
    const TorusGrid& grid = u.grid();

    ordered_json header;
    header["format"] = "fracmem-checkpoint";
    header["version"] = 1;
    header["step"] = state.step;
    header["t"] = state.t;
    header["dim"] = grid.dim();
    header["modes"] = grid.modes_per_axis();
    header["box_length"] = grid.box_length();
    header["points"] = grid.num_points();
    header["model"] = {{"damping", model.damping},
                       {"mass", model.mass},
                       {"memory_exponent", model.memory_exponent},
                       {"power", model.power},
                       {"laplacian_order", model.laplacian_order},
                       {"dim", model.dim}};

    std::ofstream out(path, std::ios::binary);
    if (!out) config_fail("cannot open for writing: " + path.string());
    out << header.dump() << "\n";
    const auto& pu = u.physical();
    const auto& pv = ut.physical();
    out.write(reinterpret_cast<const char*>(pu.data()),
              static_cast<std::streamsize>(pu.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(pv.data()),
              static_cast<std::streamsize>(pv.size() * sizeof(double)));
    if (!out) config_fail("write failed: " + path.string());
}

Checkpoint read_checkpoint(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) config_fail("cannot read checkpoint: " + path.string());
    std::string header_line;
    if (!std::getline(in, header_line)) config_fail("truncated checkpoint: " + path.string());

    Checkpoint cp;
    try {
        cp.header = ordered_json::parse(header_line);
    } catch (const nlohmann::json::parse_error& e) {
        config_fail("bad checkpoint header in " + path.string() + ": " + e.what());
    }
    if (cp.header.value("format", "") != "fracmem-checkpoint")
        config_fail("not a fracmem checkpoint: " + path.string());
    const auto points = cp.header.at("points").get<std::size_t>();
    cp.u.resize(points);
    cp.ut.resize(points);
    in.read(reinterpret_cast<char*>(cp.u.data()),
            static_cast<std::streamsize>(points * sizeof(double)));
    in.read(reinterpret_cast<char*>(cp.ut.data()),
            static_cast<std::streamsize>(points * sizeof(double)));
    if (!in) config_fail("truncated checkpoint payload: " + path.string());
    return cp;
}

int run_simulate(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);

    const int cadence =
        static_cast<int>(walk(cfg.effective, "solver.checkpoint_every").get<std::int64_t>());

    std::shared_ptr<const TorusGrid> grid;
    try {
        grid = TorusGrid::make(cfg.model.dim, cfg.box_length, cfg.grid_modes,
                               cfg.point_budget);
    } catch (const std::invalid_argument& e) {
        config_fail(std::string("grid: ") + e.what());
    }
    auto [u0, u1] = initial_data(cfg, grid);
    Simulator sim(grid, cfg.model, cfg.solver);

    std::function<void(const Simulator&)> per_step;
    if (cadence > 0) {
        per_step = [&, cadence](const Simulator& s) {
            if (s.step_index() % static_cast<std::size_t>(cadence) != 0) return;
            char name[48];
            std::snprintf(name, sizeof(name), "checkpoint_%08zu.fmsnap", s.step_index());
            write_checkpoint(out / name, s.snapshot(), cfg.model);
        };
    }

    SimulationOutcome outcome;
    outcome.report = sim.run(u0, u1, per_step);
    outcome.verdict =
        outcome.report.overflowed
            ? Verdict::overflow
            : detect_blow_up(outcome.report.trajectory, cfg.solver.blowup_threshold);
    try {
        outcome.decay =
            make_decay_report(outcome.report.trajectory, cfg.model.memory_exponent,
                              cfg.fit_lo, cfg.fit_hi, cfg.slope_tolerance);
        outcome.has_decay_report = true;
    } catch (const std::invalid_argument& e) {
        outcome.fit_note = e.what();
    }

    write_trajectory_csv(out / "trajectory.csv", outcome.report.trajectory,
                         cfg.model.memory_exponent);

    ordered_json report;
    report["verdict"] = verdict_name(outcome.verdict);
    report["weighted_sup_norm"] =
        weighted_sup_norm(outcome.report.trajectory, cfg.model.memory_exponent);
    report["theorem_compliant"] = cfg.model.theorem_compliant;
    if (outcome.report.overflowed) report["overflow_time"] = outcome.report.overflow_time;
    if (outcome.has_decay_report)
        report["decay"] = decay_report_json(outcome.decay);
    else
        report["decay_fit_skipped"] = outcome.fit_note;
    write_json_file(out / "decay_report.json", report);
    write_json_file(out / "manifest.json", manifest_json(cfg));

    return outcome.verdict == Verdict::global_looking ? 0 : 2;
}

int run_verify_lemmas(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);
    const VerifySettings& v = cfg.verify;

    ordered_json report;
    ordered_json failures = ordered_json::array();

    // Exponential decay envelope of the linear flow.
    {
        ordered_json cases = ordered_json::array();
        auto grid = TorusGrid::make(1, v.envelope.box_length, v.envelope.modes);
        Field bump = gaussian_bump(grid, 1.0);
        Field kick = axpby(0.4, gaussian_bump(grid, 0.7), 0.0, bump);
        std::vector<double> times;
        for (int i = 0; i <= 80; ++i) times.push_back(v.envelope.horizon * i / 80.0);

        for (auto [a, m] : v.envelope.damping_mass) {
            const ModelParams params = validate_params(a, m, 0.5, 2.0, 1.0, 1);
            for (int deriv = 0; deriv <= 1; ++deriv) {
                for (double s : {0.0, params.laplacian_order}) {
                    const DecayEnvelopeSeries series =
                        linear_decay_envelope(params, bump, kick, s, deriv, times);
                    const bool pass = !series.skipped && std::isfinite(series.sup) &&
                                      series.sup <= v.envelope.bound;
                    cases.push_back({{"damping", a},
                                     {"mass", m},
                                     {"time_derivative", deriv},
                                     {"sobolev_index", s},
                                     {"sup_ratio", series.sup},
                                     {"bound", v.envelope.bound},
                                     {"pass", pass}});
                    if (!pass)
                        failures.push_back({{"check", "linear_decay_envelope"},
                                            {"damping", a},
                                            {"mass", m},
                                            {"time_derivative", deriv},
                                            {"sobolev_index", s}});
                }
            }
        }
        report["linear_decay_envelope"] = cases;
    }

    // Exponential smoothing of a polynomial weight.
    {
        ordered_json cases = ordered_json::array();
        for (double c : v.smoothing_rates) {
            for (double alpha : v.weight_exponents) {
                const BoundRatioSeries s = exp_convolution_bound(
                    c, alpha, v.horizon, v.resolution, v.stabilization_tol);
                const bool pass = std::isfinite(s.sup) && s.stabilized;
                cases.push_back({{"c", c},
                                 {"alpha", alpha},
                                 {"sup_ratio", s.sup},
                                 {"last_decade_variation", s.last_decade_variation},
                                 {"pass", pass}});
                if (!pass)
                    failures.push_back(
                        {{"check", "exp_convolution_bound"}, {"c", c}, {"alpha", alpha}});
            }
        }
        report["exp_convolution_bound"] = cases;
    }

    // Exponential smoothing of the weakly singular double integral.
    {
        ordered_json cases = ordered_json::array();
        for (double c : v.smoothing_rates) {
            for (double beta : v.forcing_decays) {
                for (double gamma : v.memory_exponents) {
                    double override_exp = std::numeric_limits<double>::quiet_NaN();
                    if (v.bound_exponent_scale != 1.0) {
                        const double natural =
                            beta > 1.0 ? -gamma : 1.0 - gamma - beta;
                        override_exp = v.bound_exponent_scale * natural;
                    }
                    const BoundRatioSeries s = singular_convolution_bound(
                        c, beta, gamma, v.horizon, v.resolution, override_exp,
                        v.stabilization_tol);
                    const bool pass = std::isfinite(s.sup) && s.stabilized;
                    cases.push_back({{"c", c},
                                     {"beta", beta},
                                     {"gamma", gamma},
                                     {"sup_ratio", s.sup},
                                     {"last_decade_variation", s.last_decade_variation},
                                     {"pass", pass}});
                    if (!pass)
                        failures.push_back({{"check", "singular_convolution_bound"},
                                            {"c", c},
                                            {"beta", beta},
                                            {"gamma", gamma}});
                }
            }
        }
        report["singular_convolution_bound"] = cases;
    }

    // Gagliardo-Nirenberg interpolation over random band-limited fields.
    {
        ordered_json cases = ordered_json::array();
        std::uint64_t salt = 0;
        for (int dim : v.gn.dims) {
            const int modes = dim == 1 ? v.gn.modes_1d : v.gn.modes_2d;
            for (double q : v.gn.lebesgue_exponents) {
                for (double order : v.gn.orders) {
                    const GnCheckResult r = gn_interpolation_check(
                        dim, modes, v.gn.box_length, q, order, v.gn.samples,
                        cfg.seed + salt++);
                    const bool pass = std::isfinite(r.max_ratio) && r.max_ratio > 0.0 &&
                                      r.scale_invariance_gap <= 1e-12 &&
                                      r.refinement_gap <= 0.01;
                    cases.push_back({{"dim", dim},
                                     {"q", q},
                                     {"order", order},
                                     {"theta", r.theta},
                                     {"max_ratio", r.max_ratio},
                                     {"scale_invariance_gap", r.scale_invariance_gap},
                                     {"refinement_gap", r.refinement_gap},
                                     {"samples", r.samples_used},
                                     {"pass", pass}});
                    if (!pass)
                        failures.push_back({{"check", "gn_interpolation"},
                                            {"dim", dim},
                                            {"q", q},
                                            {"order", order}});
                }
            }
        }
        report["gn_interpolation"] = cases;
    }

    report["failures"] = failures;
    report["passed"] = failures.empty();
    write_json_file(out / "verify_report.json", report);
    write_json_file(out / "manifest.json", manifest_json(cfg));
    return failures.empty() ? 0 : 3;
}

int run_sweep(const ExperimentConfig& cfg, int workers) {
    if (cfg.sweep_paths.empty()) config_fail("sweep.axes is empty");
    for (std::size_t a = 0; a < cfg.sweep_paths.size(); ++a)
        if (cfg.sweep_values[a].empty())
            config_fail("sweep axis " + cfg.sweep_paths[a] + " has no values");

    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);

    std::size_t rows = 1;
    for (const auto& vals : cfg.sweep_values) rows *= vals.size();

    struct Row {
        std::vector<ordered_json> values;
        std::string verdict = "error";
        double slope_u = std::numeric_limits<double>::quiet_NaN();
        double slope_h = std::numeric_limits<double>::quiet_NaN();
        double slope_v = std::numeric_limits<double>::quiet_NaN();
        double wmin = std::numeric_limits<double>::quiet_NaN();
        double wmax = std::numeric_limits<double>::quiet_NaN();
        std::string compatible = "unclaimed";
        std::string error;
        bool global_looking = false;
        double epsilon = std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<Row> results(rows);

    auto run_row = [&](std::size_t index) {
        Row& row = results[index];
        std::size_t rem = index;
        std::vector<std::size_t> pick(cfg.sweep_paths.size());
        for (std::size_t a = cfg.sweep_paths.size(); a-- > 0;) {
            pick[a] = rem % cfg.sweep_values[a].size();
            rem /= cfg.sweep_values[a].size();
        }
        ordered_json row_json = cfg.effective;
        for (std::size_t a = 0; a < cfg.sweep_paths.size(); ++a) {
            row.values.push_back(cfg.sweep_values[a][pick[a]]);
            apply_override(row_json, cfg.sweep_paths[a] + "=" +
                                         cfg.sweep_values[a][pick[a]].dump());
        }
        try {
            const ExperimentConfig row_cfg = parse_config(row_json);
            row.epsilon = row_cfg.solver.epsilon;
            const SimulationOutcome outcome = simulate_config(row_cfg);
            row.verdict = verdict_name(outcome.verdict);
            row.global_looking = outcome.verdict == Verdict::global_looking;
            if (outcome.has_decay_report) {
                row.slope_u = outcome.decay.u_fit.slope;
                row.slope_h = outcome.decay.gradient_fit.slope;
                row.slope_v = outcome.decay.velocity_fit.slope;
                row.wmin = outcome.decay.weighted_ratio_min;
                row.wmax = outcome.decay.weighted_ratio_max;
            } else {
                row.error = outcome.fit_note;
            }
            if (!row_cfg.model.theorem_compliant) {
                row.compatible = "unclaimed";  // outside the proved window
            } else if (outcome.verdict != Verdict::global_looking ||
                       !outcome.has_decay_report) {
                row.compatible = "no";
            } else {
                const double limit =
                    -row_cfg.model.memory_exponent + row_cfg.slope_tolerance;
                const bool ok = row.slope_u <= limit && row.slope_h <= limit &&
                                row.slope_v <= limit;
                row.compatible = ok ? "yes" : "no";
            }
        } catch (const std::exception& e) {
            row.error = e.what();
            row.verdict = "error";
            row.compatible = "unclaimed";
        }
    };

    const int pool = std::max(1, std::min<int>(workers, static_cast<int>(rows)));
    if (pool == 1) {
        for (std::size_t i = 0; i < rows; ++i) run_row(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> threads;
        threads.reserve(pool);
        for (int w = 0; w < pool; ++w)
            threads.emplace_back([&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= rows) return;
                    run_row(i);
                }
            });
        for (auto& t : threads) t.join();
    }

    std::ofstream csv(out / "sweep.csv", std::ios::binary);
    if (!csv) config_fail("cannot open sweep.csv for writing");
    csv << "row";
    for (const auto& path : cfg.sweep_paths) csv << ',' << path;
    csv << ",verdict,slope_l2_u,slope_hsigma_u,slope_l2_ut,weighted_ratio_min,"
           "weighted_ratio_max,decay_compatible,error\n";
    std::size_t failures = 0;
    double largest_global_epsilon = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < rows; ++i) {
        const Row& r = results[i];
        if (!r.error.empty()) ++failures;
        if (r.global_looking &&
            (!std::isfinite(largest_global_epsilon) || r.epsilon > largest_global_epsilon))
            largest_global_epsilon = r.epsilon;
        csv << i;
        for (const auto& v : r.values)
            csv << ',' << (v.is_number() ? csv_number(v.get<double>())
                                         : sanitize_csv(v.dump()));
        csv << ',' << r.verdict << ',' << csv_number(r.slope_u) << ','
            << csv_number(r.slope_h) << ',' << csv_number(r.slope_v) << ','
            << csv_number(r.wmin) << ',' << csv_number(r.wmax) << ',' << r.compatible
            << ',' << sanitize_csv(r.error) << '\n';
    }
    if (!csv) config_fail("write failed: sweep.csv");
    csv.close();

    ordered_json summary;
    summary["rows"] = rows;
    summary["row_errors"] = failures;
    const bool swept_epsilon =
        std::find(cfg.sweep_paths.begin(), cfg.sweep_paths.end(), "solver.epsilon") !=
        cfg.sweep_paths.end();
    if (swept_epsilon && std::isfinite(largest_global_epsilon))
        summary["largest_global_looking_epsilon"] = largest_global_epsilon;
    write_json_file(out / "sweep_summary.json", summary);
    write_json_file(out / "manifest.json", manifest_json(cfg));
    return 0;
}

int run_fit(const ExperimentConfig& cfg) {
    if (cfg.fit_input.empty()) config_fail("fit.input must name a trajectory CSV");
    const Trajectory traj = read_trajectory_csv(cfg.fit_input);

    fs::create_directories(cfg.out_dir);
    DecayReport rep;
    try {
        rep = make_decay_report(traj, cfg.model.memory_exponent, cfg.fit_lo, cfg.fit_hi,
                                cfg.slope_tolerance);
    } catch (const std::invalid_argument& e) {
        config_fail(std::string("fit: ") + e.what());
    }
    ordered_json j = decay_report_json(rep);
    write_json_file(fs::path(cfg.out_dir) / "fit_report.json", j);
    write_json_file(fs::path(cfg.out_dir) / "manifest.json", manifest_json(cfg));
    return 0;
}

}  // namespace fracmem
