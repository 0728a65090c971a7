#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracmem/analysis.hpp"
#include "fracmem/experiment.hpp"
#include "fracmem/memory.hpp"
#include "fracmem/propagator.hpp"
#include "fracmem/spectral.hpp"
#include "fracmem/version.hpp"

namespace py = pybind11;
using namespace fracmem;

namespace {

std::vector<double> to_vector(const py::array_t<double, py::array::c_style>& a) {
    return {a.data(), a.data() + a.size()};
}

py::array_t<double> to_array(const std::vector<double>& v) {
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

ExperimentConfig config_from_json_text(const std::string& text) {
    return parse_config(ordered_json::parse(text));
}

py::dict trajectory_dict(const Trajectory& t) {
    py::dict d;
    d["t"] = to_array(t.times);
    d["l2_u"] = to_array(t.l2_u);
    d["hsigma_u"] = to_array(t.hsigma_u);
    d["l2_ut"] = to_array(t.l2_ut);
    return d;
}

py::dict fit_dict(const DecayFit& f) {
    py::dict d;
    d["slope"] = f.slope;
    d["intercept"] = f.intercept;
    d["residual"] = f.residual;
    d["samples"] = f.samples;
    return d;
}

}  // namespace

PYBIND11_MODULE(_fracmem, m) {
    m.doc() = "Pseudospectral solver and decay-verification suite for the damped "
              "fractional Klein-Gordon equation with nonlinear memory";
    m.attr("__version__") = FRACMEM_VERSION;

    py::class_<ModelParams>(m, "ModelParams")
        .def_readonly("damping", &ModelParams::damping)
        .def_readonly("mass", &ModelParams::mass)
        .def_readonly("memory_exponent", &ModelParams::memory_exponent)
        .def_readonly("power", &ModelParams::power)
        .def_readonly("laplacian_order", &ModelParams::laplacian_order)
        .def_readonly("dim", &ModelParams::dim)
        .def_readonly("theorem_compliant", &ModelParams::theorem_compliant)
        .def_readonly("below_unit_order", &ModelParams::below_unit_order);

    py::class_<AdmissibleRange>(m, "AdmissibleRange")
        .def_readonly("lower", &AdmissibleRange::lower)
        .def_readonly("upper", &AdmissibleRange::upper)
        .def_readonly("unbounded", &AdmissibleRange::unbounded)
        .def_readonly("empty", &AdmissibleRange::empty);

    m.def("validate_params", &validate_params, py::arg("damping"), py::arg("mass"),
          py::arg("memory_exponent"), py::arg("power"), py::arg("laplacian_order"),
          py::arg("dim"));
    m.def("admissible_exponent_interval", &admissible_exponent_interval, py::arg("dim"),
          py::arg("laplacian_order"), py::arg("memory_exponent"));
    m.def("linear_decay_rate", &linear_decay_rate, py::arg("damping"), py::arg("mass"));
    m.def(
        "gn_theta",
        [](int dim, double order, double q) {
            const GnTheta t = gn_theta(dim, order, q);
            return py::make_tuple(t.value, t.within_unit_interval);
        },
        py::arg("dim"), py::arg("laplacian_order"), py::arg("lebesgue_exponent"));

    m.def(
        "kernel_multipliers",
        [](double damping, double mass, double xi2sigma, double t) {
            ModelParams p;
            p.damping = damping;
            p.mass = mass;
            const KernelValues k =
                kernel_multipliers(characteristic_roots(p, xi2sigma), t);
            return py::make_tuple(k.k1, k.k2, k.dk1, k.dk2);
        },
        py::arg("damping"), py::arg("mass"), py::arg("xi2sigma"), py::arg("t"));

    m.def(
        "product_integration_weights",
        [](double gamma, double dt, std::size_t j) {
            return to_array(product_integration_weights(gamma, dt, j));
        },
        py::arg("gamma"), py::arg("dt"), py::arg("steps"));

    m.def(
        "fractional_integral",
        [](double gamma, const py::array_t<double, py::array::c_style>& nodes,
           const py::array_t<double, py::array::c_style>& values, double tau) {
            const auto n = to_vector(nodes);
            const auto v = to_vector(values);
            return fractional_integral_nonuniform(gamma, n, v, tau);
        },
        py::arg("gamma"), py::arg("nodes"), py::arg("values"), py::arg("tau"));

    m.def(
        "fractional_laplacian_apply",
        [](const py::array_t<double, py::array::c_style>& values, int dim,
           double box_length, double order) {
            const auto v = to_vector(values);
            const auto modes = static_cast<int>(std::llround(
                std::pow(static_cast<double>(v.size()), 1.0 / dim)));
            auto grid = TorusGrid::make(dim, box_length, modes);
            Field f = Field::from_physical(grid, v);
            return to_array(to_physical(fractional_laplacian(f, order)).physical());
        },
        py::arg("values"), py::arg("dim"), py::arg("box_length"), py::arg("order"));

    m.def(
        "fit_decay_rate",
        [](const py::array_t<double, py::array::c_style>& times,
           const py::array_t<double, py::array::c_style>& values, double lo, double hi) {
            return fit_dict(fit_decay_rate(to_vector(times), to_vector(values), lo, hi));
        },
        py::arg("times"), py::arg("values"), py::arg("t_lo"), py::arg("t_hi"));

    m.def(
        "exp_convolution_bound",
        [](double c, double alpha, double horizon, int resolution) {
            const BoundRatioSeries s = exp_convolution_bound(c, alpha, horizon, resolution);
            py::dict d;
            d["sup"] = s.sup;
            d["last_decade_variation"] = s.last_decade_variation;
            d["stabilized"] = s.stabilized;
            d["t"] = to_array(s.times);
            d["ratio"] = to_array(s.ratios);
            return d;
        },
        py::arg("c"), py::arg("alpha"), py::arg("horizon"), py::arg("resolution") = 512);

    m.def(
        "singular_convolution_bound",
        [](double c, double beta, double gamma, double horizon, int resolution) {
            const BoundRatioSeries s =
                singular_convolution_bound(c, beta, gamma, horizon, resolution);
            py::dict d;
            d["sup"] = s.sup;
            d["last_decade_variation"] = s.last_decade_variation;
            d["stabilized"] = s.stabilized;
            d["t"] = to_array(s.times);
            d["ratio"] = to_array(s.ratios);
            return d;
        },
        py::arg("c"), py::arg("beta"), py::arg("gamma"), py::arg("horizon"),
        py::arg("resolution") = 512);

    m.def(
        "gn_interpolation_check",
        [](int dim, int modes, double box_length, double q, double order, int samples,
           std::uint64_t seed) {
            const GnCheckResult r =
                gn_interpolation_check(dim, modes, box_length, q, order, samples, seed);
            py::dict d;
            d["max_ratio"] = r.max_ratio;
            d["scale_invariance_gap"] = r.scale_invariance_gap;
            d["refinement_gap"] = r.refinement_gap;
            d["theta"] = r.theta;
            d["samples_used"] = r.samples_used;
            return d;
        },
        py::arg("dim"), py::arg("modes"), py::arg("box_length"),
        py::arg("lebesgue_exponent"), py::arg("order"), py::arg("samples"),
        py::arg("seed"));

    m.def("default_config", [] { return default_config().dump(2); });

    m.def(
        "simulate",
        [](const std::string& config_json) {
            const ExperimentConfig cfg = config_from_json_text(config_json);
            const SimulationOutcome out = simulate_config(cfg);
            py::dict d;
            d["verdict"] = std::string(verdict_name(out.verdict));
            d["trajectory"] = trajectory_dict(out.report.trajectory);
            d["weighted_sup_norm"] =
                weighted_sup_norm(out.report.trajectory, cfg.model.memory_exponent);
            if (out.has_decay_report) {
                py::dict fits;
                fits["l2_u"] = fit_dict(out.decay.u_fit);
                fits["hsigma_u"] = fit_dict(out.decay.gradient_fit);
                fits["l2_ut"] = fit_dict(out.decay.velocity_fit);
                d["fits"] = fits;
            } else {
                d["fit_note"] = out.fit_note;
            }
            return d;
        },
        py::arg("config_json"),
        "Run one simulation from a JSON config string; returns the verdict, the "
        "diagnostic trajectory and the fitted decay slopes.");

    m.def(
        "picard",
        [](const std::string& config_json, double tol, int max_iter) {
            const ExperimentConfig cfg = config_from_json_text(config_json);
            auto grid = TorusGrid::make(cfg.model.dim, cfg.box_length, cfg.grid_modes,
                                        cfg.point_budget);
            auto [u0, u1] = initial_data(cfg, grid);
            const PicardReport rep =
                picard_iterate(u0, u1, cfg.model, cfg.solver, tol, max_iter);
            py::dict d;
            d["trajectory"] = trajectory_dict(rep.trajectory);
            d["update_norms"] = to_array(rep.update_norms);
            d["contraction_factors"] = to_array(rep.contraction_factors);
            d["converged"] = rep.converged;
            d["non_contraction"] = rep.non_contraction;
            d["iterations"] = rep.iterations;
            d["residual_norm"] = rep.residual_norm;
            return d;
        },
        py::arg("config_json"), py::arg("tol") = 1e-12, py::arg("max_iter") = 16,
        "Mild-solution fixed-point oracle on the configured problem.");
}
