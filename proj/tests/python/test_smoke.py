import math

import numpy as np
import pytest

import ncmetric as nc


def m(*rows):
    return np.array(rows, dtype=complex)


def test_delta_ball_scalar():
    # δ(0, 1/2)(−1/2) on the disk: (1/2)/√(1 − 1/4).
    r = nc.delta("ball", m([0]), m([0.5]), m([-0.5]), method="closed_ball")
    assert r["value"] == pytest.approx(1 / math.sqrt(3), abs=1e-15)
    ray = nc.delta("ball", m([0]), m([0.5]), m([-0.5]), method="ray")
    assert abs(ray["value"] - r["value"]) < 5e-6
    assert ray["bracket"][0] <= ray["value"] <= ray["bracket"][1]


def test_delta_halfplane_and_kernel_agree():
    a = m([0.3 + 1.0j, 0.1], [0.2j, -0.1 + 2.0j])
    c = m([1.0j, 0], [0, 0.5 + 1.5j])
    b = m([1, 0.5j], [0, -1])
    closed = nc.delta("halfplane", a, c, b, method="closed_halfplane")["value"]
    kernel = nc.delta("halfplane", a, c, b, method="kernel")["value"]
    assert kernel == pytest.approx(closed, rel=1e-12)


def test_delta_tilde_and_distances():
    r = 0.5
    assert nc.delta_tilde("ball", m([0]), m([r]))["value"] == pytest.approx(r / math.sqrt(1 - r * r), rel=1e-14)
    div = nc.dtilde_upper("ball", m([0]), m([r]), refinements=8)
    assert div["level_values"][0] == pytest.approx(r / math.sqrt(1 - r * r), rel=1e-12)
    assert div["value"] <= math.atanh(r) + 1e-3
    path = nc.d_upper("ball", m([0]), m([r]))
    assert path["value"] == pytest.approx(math.atanh(r), abs=1e-4)


def test_contains_and_errors():
    assert nc.contains("ball", m([0.5, 0], [0, 0.2]))
    assert not nc.contains("ball", m([2]))
    with pytest.raises(nc.NcError) as info:
        nc.delta("ball", m([2]), m([0]), m([1]), method="closed_ball")
    assert info.value.kind == "PointOutsideDomain"
    with pytest.raises(nc.NcError):
        nc.delta("torus", m([0]), m([0]), m([1]))


def test_functions():
    f = nc.spec({"variant": "polynomial", "coeffs": [0, 0, 1]})
    x = m([0.1, 0.2], [0.3, 0.4])
    np.testing.assert_allclose(nc.eval_function(f, x), x @ x, atol=1e-15)
    a, c, b = m([0.2]), m([-0.4]), m([0.5])
    np.testing.assert_allclose(nc.delta_f(f, a, c, b), a @ b + b @ c, atol=1e-15)
    mob = nc.spec({"variant": "moebius_ball", "alpha": [0.3, 0]})
    assert abs(nc.eval_function(mob, m([0.3]))[0, 0]) < 1e-15


def test_free_convolution():
    bern = nc.spec({"variant": "bernoulli"})
    two = nc.spec({"variant": "scalar_power", "t": 2})
    z = 0.5 + 1.0j
    g = nc.convolved_G(bern, two, m([z]))[0, 0]
    assert abs(g - 1 / (np.sqrt(z - 2) * np.sqrt(z + 2))) < 1e-10
    omega, trace = nc.subordination(bern, two, m([z]))
    assert trace["converged"]
    assert omega.shape == (1, 1)
    grid = nc.density_grid(nc.spec({"variant": "semicircle", "variance": 1}), two, -3, 3, eps=1e-3, points=301)
    assert len(grid["x"]) == 301
    assert all(grid["converged"])
    assert grid["mass"] == pytest.approx(1.0, abs=2e-2)


def test_matrix_model_G():
    x = np.diag([1.0, -1.0, 0.5, 0.2]).astype(complex)
    model = nc.spec({"variant": "matrix", "X": nc.matrix_spec(x), "blocks": [2, 2]})
    b = 1.0j * np.eye(4, dtype=complex)
    g = nc.cauchy_G(model, b)
    np.testing.assert_allclose(g, np.diag(1 / (1.0j - np.diag(x))), atol=1e-14)


def test_counterexamples_and_properties():
    mc = nc.matrix_convexity_counterexample()
    assert mc["level4_inside"] and not mc["level2_inside"]
    bt = nc.bounded_tilde_counterexample(seed=7, samples=20)
    assert bt["max_tilde"] <= bt["bound"] + 1e-9
    assert bt["ball_tilde"] > 10
    results = nc.run_properties(seed=7, filter="matcore/")
    assert results and all(r["pass"] for r in results)
    assert nc.properties_report(seed=7, filter="matcore/") == nc.properties_report(seed=7, filter="matcore/")
