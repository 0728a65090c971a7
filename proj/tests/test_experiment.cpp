#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "fracmem/experiment.hpp"

using namespace fracmem;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    const fs::path p = fs::temp_directory_path() /
                       ("fracmem_test_" + tag + "_" + std::to_string(rng()));
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ordered_json small_run_config(const fs::path& out) {
    ordered_json j;
    j["model"] = {{"damping", 1.0}, {"mass", 1.0}, {"memory_exponent", 0.75},
                  {"power", 2.0},   {"laplacian_order", 1.0}, {"dim", 1}};
    j["grid"] = {{"modes", 64}, {"box_length", 32.0}};
    j["solver"] = {{"dt", 0.05}, {"horizon", 3.0}, {"epsilon", 1e-3}};
    j["fit"] = {{"t_min", 0.5}, {"t_max", 3.0}};
    j["output"] = {{"dir", out.string()}};
    return j;
}

}  // namespace

TEST_SUITE_BEGIN("experiment");

TEST_CASE("defaults parse and unknown keys are rejected") {
    const ExperimentConfig cfg = parse_config(ordered_json::object());
    CHECK(cfg.mode == "simulate");
    CHECK(cfg.grid_modes == 512);
    CHECK(cfg.model.theorem_compliant);

    ordered_json bad = ordered_json::object();
    bad["solvr"] = {{"dt", 0.1}};
    CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("unknown config key"),
                         ConfigError);

    ordered_json bad_nested = ordered_json::object();
    bad_nested["solver"] = {{"dtt", 0.1}};
    CHECK_THROWS_WITH_AS(parse_config(bad_nested), doctest::Contains("solver.dtt"),
                         ConfigError);
}

TEST_CASE("model validation failures carry the field name") {
    ordered_json j = ordered_json::object();
    j["model"] = {{"power", 0.5}};
    CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("power"), ConfigError);
}

TEST_CASE("overrides parse values as JSON with a string fallback") {
    ordered_json j = ordered_json::object();
    apply_override(j, "solver.dt=0.25");
    apply_override(j, "data.kind=gaussian");
    apply_override(j, "sweep.axes.model.power=[1.5,2]");
    CHECK(j["solver"]["dt"] == 0.25);
    CHECK(j["data"]["kind"] == "gaussian");
    CHECK(j["sweep"]["axes"]["model"]["power"].is_array());
    CHECK_THROWS_AS(apply_override(j, "no_equals_sign"), ConfigError);
}

TEST_CASE("malformed config files report the line") {
    const fs::path dir = fresh_dir("badcfg");
    const fs::path cfgfile = dir / "bad.json";
    std::ofstream(cfgfile) << "{\n  \"model\": {\n  oops\n}\n";
    CHECK_THROWS_WITH_AS(load_config_file(cfgfile), doctest::Contains("line 3"),
                         ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("csv numbers round-trip doubles") {
    for (double v : {1.0 / 3.0, 2.0e-17, 123456.789, -0.75}) {
        const std::string s = csv_number(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("simulate writes its artifacts and reports global-looking") {
    const fs::path dir = fresh_dir("simulate");
    const ExperimentConfig cfg = parse_config(small_run_config(dir));
    CHECK(run_simulate(cfg) == 0);
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "decay_report.json"));
    CHECK(fs::exists(dir / "manifest.json"));

    const Trajectory traj = read_trajectory_csv(dir / "trajectory.csv");
    CHECK(traj.size() == 61);
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == doctest::Approx(3.0));

    const ordered_json manifest = ordered_json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["config"]["solver"]["dt"] == 0.05);
    fs::remove_all(dir);
}

TEST_CASE("simulate is byte-deterministic for a fixed config and seed") {
    const fs::path a = fresh_dir("det_a");
    const fs::path b = fresh_dir("det_b");
    CHECK(run_simulate(parse_config(small_run_config(a))) == 0);
    CHECK(run_simulate(parse_config(small_run_config(b))) == 0);
    CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
    CHECK(slurp(a / "decay_report.json") == slurp(b / "decay_report.json"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("zero amplitude runs finish cleanly with zero norms") {
    const fs::path dir = fresh_dir("zeroeps");
    ordered_json j = small_run_config(dir);
    j["solver"]["epsilon"] = 0.0;
    CHECK(run_simulate(parse_config(j)) == 0);
    const Trajectory traj = read_trajectory_csv(dir / "trajectory.csv");
    for (double v : traj.l2_u) CHECK(v == 0.0);
    const ordered_json rep = ordered_json::parse(slurp(dir / "decay_report.json"));
    CHECK(rep.contains("decay_fit_skipped"));
    fs::remove_all(dir);
}

TEST_CASE("growth configurations exit with code two") {
    const fs::path dir = fresh_dir("growth");
    ordered_json j = small_run_config(dir);
    j["model"]["memory_exponent"] = 0.2;
    j["model"]["power"] = 3.0;
    j["solver"]["epsilon"] = 10.0;
    j["solver"]["horizon"] = 25.0;
    j["fit"] = {{"t_min", nullptr}, {"t_max", nullptr}};
    CHECK(run_simulate(parse_config(j)) == 2);
    fs::remove_all(dir);
}

TEST_CASE("checkpoints round-trip") {
    const fs::path dir = fresh_dir("checkpoint");
    ordered_json j = small_run_config(dir);
    j["solver"]["checkpoint_every"] = 20;
    j["solver"]["horizon"] = 2.0;
    CHECK(run_simulate(parse_config(j)) == 0);
    const fs::path snap = dir / "checkpoint_00000020.fmsnap";
    REQUIRE(fs::exists(snap));
    const Checkpoint cp = read_checkpoint(snap);
    CHECK(cp.header["t"] == doctest::Approx(1.0));
    CHECK(cp.header["modes"] == 64);
    CHECK(cp.u.size() == 64);
    CHECK(cp.ut.size() == 64);
    bool any_nonzero = false;
    for (double x : cp.u) any_nonzero |= x != 0.0;
    CHECK(any_nonzero);
    fs::remove_all(dir);
}

TEST_CASE("fit mode reads a trajectory csv and reports slopes") {
    const fs::path dir = fresh_dir("fit");
    Trajectory traj;
    for (int i = 0; i <= 120; ++i) {
        const double t = 0.5 * i;
        traj.times.push_back(t);
        traj.l2_u.push_back(std::pow(1.0 + t, -0.75));
        traj.hsigma_u.push_back(std::pow(1.0 + t, -0.75));
        traj.l2_ut.push_back(std::pow(1.0 + t, -1.75));
    }
    write_trajectory_csv(dir / "trajectory.csv", traj, 0.75);

    ordered_json j;
    j["mode"] = "fit";
    j["fit"] = {{"input", (dir / "trajectory.csv").string()},
                {"t_min", 10.0},
                {"t_max", 60.0}};
    j["output"] = {{"dir", dir.string()}};
    CHECK(run_fit(parse_config(j)) == 0);
    const ordered_json rep = ordered_json::parse(slurp(dir / "fit_report.json"));
    CHECK(rep["fits"]["l2_u"]["slope"].get<double>() == doctest::Approx(-0.75).epsilon(1e-6));
    CHECK(rep["fits"]["l2_ut"]["slope"].get<double>() == doctest::Approx(-1.75).epsilon(1e-6));
    fs::remove_all(dir);
}

TEST_CASE("fit mode requires an input file") {
    ordered_json j;
    j["mode"] = "fit";
    CHECK_THROWS_AS(run_fit(parse_config(j)), ConfigError);
}

TEST_CASE("sweep runs rows in deterministic order and keeps going on row errors") {
    const fs::path dir = fresh_dir("sweep");
    ordered_json j = small_run_config(dir);
    j["mode"] = "sweep";
    j["solver"]["horizon"] = 2.0;
    j["fit"] = {{"t_min", 0.2}, {"t_max", 2.0}};
    // second axis value is invalid (power must exceed 1) and must not abort the sweep
    j["sweep"] = {{"axes", {{"model.power", {2.0, 0.5, 3.0}}}}};
    CHECK(run_sweep(parse_config(j), 2) == 0);

    const std::string csv = slurp(dir / "sweep.csv");
    const bool has_row0 = csv.find("\n0,2,") != std::string::npos;
    CHECK(has_row0);
    CHECK(csv.find("\n1,0.5,error") != std::string::npos);
    CHECK(csv.find("\n2,3,") != std::string::npos);

    const ordered_json summary = ordered_json::parse(slurp(dir / "sweep_summary.json"));
    CHECK(summary["rows"] == 3);
    CHECK(summary["row_errors"] == 1);

    // determinism across a rerun with the same seed
    const fs::path dir2 = fresh_dir("sweep2");
    j["output"]["dir"] = dir2.string();
    CHECK(run_sweep(parse_config(j), 1) == 0);
    CHECK(slurp(dir2 / "sweep.csv") == csv);
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("sweeps with no axes or empty axes are config errors") {
    ordered_json j;
    j["mode"] = "sweep";
    CHECK_THROWS_AS(run_sweep(parse_config(j), 1), ConfigError);
    j["sweep"] = {{"axes", {{"model.power", ordered_json::array()}}}};
    CHECK_THROWS_AS(run_sweep(parse_config(j), 1), ConfigError);
}

TEST_CASE("verify-lemmas passes on a reduced grid and honours the wrong-bound hook") {
    const fs::path dir = fresh_dir("verify");
    ordered_json j;
    j["mode"] = "verify-lemmas";
    j["output"] = {{"dir", dir.string()}};
    j["verify"] = {{"horizon", 1000.0},
                   {"smoothing_rates", {1.0}},
                   {"weight_exponents", {1.0}},
                   {"forcing_decays", {2.0}},
                   {"memory_exponents", {0.5}},
                   {"envelope", {{"modes", 128}, {"horizon", 10.0}}},
                   {"gn", {{"dims", {1}}, {"lebesgue_exponents", {4.0}},
                           {"orders", {1.0}}, {"samples", 25}, {"modes_1d", 128}}}};
    CHECK(run_verify_lemmas(parse_config(j)) == 0);
    const ordered_json rep = ordered_json::parse(slurp(dir / "verify_report.json"));
    CHECK(rep["passed"] == true);
    CHECK(rep["failures"].empty());

    // deliberately wrong bound: exit 3 and the failing check is named
    j["verify"]["bound_exponent_scale"] = 2.0;
    const fs::path dir2 = fresh_dir("verify_bad");
    j["output"]["dir"] = dir2.string();
    CHECK(run_verify_lemmas(parse_config(j)) == 3);
    const ordered_json rep2 = ordered_json::parse(slurp(dir2 / "verify_report.json"));
    CHECK(rep2["passed"] == false);
    CHECK(rep2["failures"][0]["check"] == "singular_convolution_bound");
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_SUITE_END();
