import math

import numpy as np
import pytest

import rmgen

SHIFTED_EXP = {"kind": "shifted_exponential", "rate": 1, "shift": -1}


def test_law_stats():
    s = rmgen.law_stats(SHIFTED_EXP, 500)
    assert abs(s["mean"]) < 1e-15
    assert s["sigma2"] == pytest.approx(1.0)
    assert s["K"] == pytest.approx((1.0, 0.0, 0.0))


def test_generator_rows_sum_to_zero():
    g = rmgen.sample_generator({"kind": "exponential", "rate": 1}, 30, seed=3)
    assert np.abs(g["L"].sum(axis=1)).max() < 1e-12
    assert g["X"].shape == (30, 30)


def test_spectra_and_hermitization():
    M = rmgen.rescaled(SHIFTED_EXP, 40, seed=1)
    eig = np.asarray(rmgen.eigenvalues(M))
    assert abs(eig.sum() - np.trace(M)) < 1e-8
    sv = rmgen.singular_values(M, 0.5 + 0.5j)
    assert np.allclose(sv, np.linalg.svd(M - (0.5 + 0.5j) * np.eye(40), compute_uv=False))
    alpha, _ = rmgen.gamma_matrix(M, 0.5 + 0.5j, 0.3j)
    assert abs(alpha - rmgen.hermitization_stieltjes(M, 0.5 + 0.5j, 0.3j)) < 1e-9


def test_limit_law():
    K0 = (0.0, 0.0, 0.0)
    assert rmgen.brown_density(0.3j, K0) == pytest.approx(1 / math.pi, abs=1e-8)
    assert rmgen.solve_f(0.6, K0) == pytest.approx(0.8, abs=1e-12)
    assert rmgen.solve_h(0, 1.0, K0) == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-12)
    assert rmgen.brown_density(0, (1.0, 0.0, 0.0)) == pytest.approx(0.2283570248611667, abs=1e-8)
    assert not rmgen.support_indicator(2.0, K0)
    s = rmgen.stieltjes_fixed_point(0, 2j, K0)
    assert s == pytest.approx(1j * (math.sqrt(2) - 1), abs=1e-12)


def test_invariant_measure_two_state():
    X = np.array([[0.0, 1.0], [3.0, 0.0]])
    L = X - np.diag(X.sum(axis=1))
    assert rmgen.invariant_measure(L) == pytest.approx([0.75, 0.25], abs=1e-12)
    assert rmgen.tv_uniform([1.0, 0, 0, 0]) == pytest.approx(0.75)


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        rmgen.law_stats({"kind": "cauchy"}, 10)
