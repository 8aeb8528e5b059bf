import math

import numpy as np
import pytest

import lapeig


def test_kernel_constants():
    assert lapeig.sigma_eta("indicator", 1) == pytest.approx(2 / 3, abs=1e-12)
    assert lapeig.sigma_tilde_eta("indicator", 1) == pytest.approx(2.0, abs=1e-12)
    k = lapeig.Kernel.parse("indicator")
    assert k.psi(0.0) == pytest.approx(0.5)


def test_sample_graph_spectrum():
    cloud = lapeig.sample("circle", n=400, seed=3)
    assert len(cloud) == 400
    assert cloud.params.shape == (400, 1)
    eps = lapeig.epsilon_schedule(400, 1)
    g = lapeig.build_graph(cloud, "indicator", eps)
    values, vectors, weights = lapeig.spectrum(g, 4)
    assert values.shape == (5,)
    assert abs(values[0]) < 1e-8
    gram = vectors.T @ (weights[:, None] * vectors)
    assert np.allclose(gram, np.eye(5), atol=1e-8)
    lam = lapeig.rescale_unnormalized(values[1], 400, eps, lapeig.sigma_eta("indicator", 1), 1)
    assert lam == pytest.approx(1 / (2 * math.pi), rel=0.3)


def test_small_path_graph():
    g = lapeig.build_graph_points(np.array([[0.0], [1.0], [2.0]]), "indicator", 1.5, 1)
    values, _, _ = lapeig.spectrum(g, 2)
    assert np.allclose(values, [0, 1, 3], atol=1e-9)
    values, _, _ = lapeig.spectrum(g, 2, normalized=True)
    assert np.allclose(values, [0, 0.5, 7 / 6], atol=1e-9)


def test_errors_carry_codes():
    with pytest.raises(lapeig.LapeigError) as info:
        lapeig.Kernel.parse("nope")
    assert info.value.code == "InvalidArgument"
    with pytest.raises(ValueError):
        lapeig.sample("torus", density="cos:0.5", n=10, seed=1)


def test_converge_is_deterministic():
    a = lapeig.converge(n_grid=[128, 256], trials=2, k_max=2, seed=4)
    b = lapeig.converge(n_grid=[128, 256], trials=2, k_max=2, seed=4)
    assert a["csv"] == b["csv"]
    assert len(a["rows"]) == 12
    assert a["targets"][1] == pytest.approx(1 / (2 * math.pi))


def test_interpolate_constants():
    cloud = lapeig.sample("circle", n=200, seed=2)
    out = lapeig.interpolate(cloud, np.ones(200), "indicator", 0.3, [[0.1], [2.0], [5.5]])
    assert out == [1.0, 1.0, 1.0]


def test_dyadic_and_isometry():
    assert lapeig.dyadic_alpha(0.5, 2) == [0.0, 0.375, 1.0, 0.375, 0.0]
    assert lapeig.isometry_constant([0.0] * 9) == pytest.approx(1.0)


def test_fit_rate():
    n = [512, 1024, 2048, 4096]
    fit = lapeig.fit_rate(n, [x ** -0.5 for x in n])
    assert fit["slope"] == pytest.approx(-0.5)


def test_analytic_and_oracle():
    assert lapeig.analytic_spectrum("torus", 4, normalized=True) == pytest.approx([0, 1, 1, 1, 1])
    o = lapeig.oracle_spectrum(0.5, 2048, 2)
    assert o[1] == pytest.approx(0.1591548182522, rel=1e-8)
