import json
import math

import numpy as np
import pytest

import fracmem


def test_version_present():
    assert fracmem.__version__


def test_parameter_operations():
    p = fracmem.validate_params(2.0, 1.0, 0.8, 2.0, 1.0, 3)
    assert p.theorem_compliant
    assert not p.below_unit_order

    r = fracmem.admissible_exponent_interval(3, 1.0, 0.8)
    assert r.lower == pytest.approx(1.25)
    assert r.upper == pytest.approx(3.0)
    assert not r.empty

    assert fracmem.linear_decay_rate(2.0, 1.0) == pytest.approx(2.0 - math.sqrt(3.0))
    theta, valid = fracmem.gn_theta(2, 1.0, 4.0)
    assert theta == pytest.approx(0.5)
    assert valid


def test_invalid_parameters_raise():
    with pytest.raises(ValueError):
        fracmem.validate_params(1.0, 1.0, 0.5, 1.0, 1.0, 1)


def test_product_integration_weights():
    w = fracmem.product_integration_weights(0.5, 1.0, 1)
    assert np.allclose(w, [2.0 / 3.0, 4.0 / 3.0])


def test_fractional_integral_against_beta():
    nodes = np.linspace(0.0, 1.0, 2001)
    got = fracmem.fractional_integral(0.5, nodes, nodes**2, 1.0)
    exact = math.gamma(0.5) * math.gamma(3.0) / math.gamma(3.5)
    assert got == pytest.approx(exact, abs=1e-5)


def test_fractional_laplacian_on_cosine():
    N, L = 64, 2.0 * np.pi
    x = -L / 2 + np.arange(N) * (L / N)
    u = np.cos(3.0 * x)
    out = fracmem.fractional_laplacian_apply(u, 1, L, 1.0)
    assert np.allclose(out, 9.0 * u, atol=1e-9)


def test_kernel_multipliers_initial_conditions():
    k1, k2, dk1, dk2 = fracmem.kernel_multipliers(1.0, 2.0, 0.0, 0.0)
    assert (k1, k2, dk1, dk2) == (1.0, 0.0, 0.0, 1.0)


def test_exp_convolution_bound_stabilizes():
    out = fracmem.exp_convolution_bound(1.0, 2.0, 1000.0)
    assert out["stabilized"]
    assert math.isfinite(out["sup"])


def test_small_simulation_is_deterministic():
    cfg = json.loads(fracmem.default_config())
    cfg["grid"] = {"modes": 64, "box_length": 32.0}
    cfg["solver"]["dt"] = 0.05
    cfg["solver"]["horizon"] = 2.0
    cfg["fit"] = {"t_min": 0.2, "t_max": 2.0}
    text = json.dumps(cfg)

    a = fracmem.simulate(text)
    b = fracmem.simulate(text)
    assert a["verdict"] == "global-looking"
    assert np.all(np.isfinite(a["trajectory"]["l2_u"]))
    assert np.array_equal(a["trajectory"]["l2_u"], b["trajectory"]["l2_u"])
    assert a["fits"]["l2_u"]["slope"] == b["fits"]["l2_u"]["slope"]


def test_picard_contracts_on_small_data():
    cfg = json.loads(fracmem.default_config())
    cfg["grid"] = {"modes": 64, "box_length": 32.0}
    cfg["solver"]["dt"] = 0.05
    cfg["solver"]["horizon"] = 3.0
    out = fracmem.picard(json.dumps(cfg), tol=1e-12, max_iter=12)
    assert out["converged"]
    assert np.all(np.asarray(out["contraction_factors"]) < 1.0)
