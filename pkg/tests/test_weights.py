import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jacobi_mop.linalg import ZeroBase
from jacobi_mop.painleve import exact_scalar_h
from jacobi_mop.weights import (EndpointEvaluation, NotPolynomial, PearsonWeight, WeightError,
                                derive_h_from_factors, diagonal_jacobi, folded_left_h, left_jump_factor,
                                nilpotent_alpha, noncommuting_quadratic, pearson_residual, poly_degree,
                                poly_eval, scalar_jacobi)

from conftest import WEIGHTS


def test_scalar_weight_values():
    w = scalar_jacobi(0.5, 1.0, 1.0)
    t = 0.3
    assert abs(w.eval_W(t)[0, 0] - t**0.5 * (1 - t) * math.exp(t)) < 1e-15


def test_nilpotent_weight_is_unipotent_log():
    w = nilpotent_alpha()
    t = 0.25
    expected = np.array([[1.0, math.log(t)], [0.0, 1.0]])
    assert np.allclose(w.eval_W(t), expected, atol=1e-15)


def test_noncommuting_weight_factors():
    w = noncommuting_quadratic()
    t = 0.4
    k, c = 0.6, 0.7
    left = math.exp(c * t) * np.array([[1.0, k * t], [0.0, 1.0]]) @ np.diag([t**0.5, t**0.25])
    assert np.allclose(w.eval_W(t), left @ np.array([[1.0, 0.3], [-0.2, 1.0]]), atol=1e-14)


@pytest.mark.parametrize("t", [0.0, 1.0, -0.1, 1.5])
def test_eval_w_rejects_points_off_the_open_interval(t):
    with pytest.raises(EndpointEvaluation):
        scalar_jacobi(0.5, 0.5).eval_W(t)


def test_eval_factors_reject_branch_points():
    w = scalar_jacobi(0.5, 0.5)
    with pytest.raises(ZeroBase):
        w.eval_WL(0.0)
    with pytest.raises(ZeroBase):
        w.eval_WR(1.0)


def test_left_factor_sides_differ_by_the_jump():
    w = scalar_jacobi(0.25, 0.0)
    above, below = w.eval_WL(2.0, "above"), w.eval_WL(2.0, "below")
    # z**alpha with arg in (0, 2 pi): the value below the positive axis is e^{2 pi i alpha} times the value above
    assert np.allclose(np.linalg.solve(above, below), left_jump_factor(w), atol=1e-14)
    assert abs(left_jump_factor(w)[0, 0] - np.exp(2j * math.pi * 0.25)) < 1e-15


def test_nilpotent_jump_factor():
    jf = left_jump_factor(nilpotent_alpha())
    assert np.allclose(jf, [[1, 2j * math.pi], [0, 1]], atol=1e-14)


def test_continued_weight_matches_interval_values():
    w = WEIGHTS["noncommuting"]()
    for t in (0.2, 0.55, 0.9):
        assert np.allclose(w.eval_W_continued(t)[0], w.eval_W(t), atol=1e-14)


@pytest.mark.parametrize("a,b,c", [(0.0, 0.0, 0.0), (0.5, 1.0, 0.0), (0.5, 1 / 3, 1.0), (-0.5, 2.0, -0.7)])
def test_scalar_pearson_coefficients(a, b, c):
    w = scalar_jacobi(a, b, c)
    hl = np.zeros(3, dtype=complex)
    hl[: w.hL.shape[0]] = w.hL[:, 0, 0]
    assert np.allclose(hl, [a, c - a, -c], atol=1e-12)
    hr = np.zeros(2, dtype=complex)
    hr[: w.hR.shape[0]] = w.hR[:, 0, 0]
    assert np.allclose(hr, [0, -b], atol=1e-12)
    folded = folded_left_h(w)[:, 0, 0]
    assert np.allclose(folded, exact_scalar_h(a, b, c).ravel(), atol=1e-12)


def test_noncommuting_quadratic_coefficient():
    w = noncommuting_quadratic()
    h = folded_left_h(w)
    assert np.allclose(h[2], [[-0.7, -0.6 * (1 + 0.25 - 0.5)], [0, -0.7]], atol=1e-12)
    assert np.allclose(h[0], np.diag([0.5, 0.25]), atol=1e-12)
    assert np.linalg.norm(h[0] @ h[2] - h[2] @ h[0]) > 1e-2


def test_folded_h_needs_scalar_right_factor():
    w = diagonal_jacobi([0.0, 0.5], [0.0, 1.0])
    with pytest.raises(WeightError):
        folded_left_h(w)


@pytest.mark.parametrize("name", sorted(WEIGHTS))
@pytest.mark.parametrize("t", [0.1, 0.5, 0.83])
def test_pearson_equation_holds(name, t):
    assert pearson_residual(WEIGHTS[name](), t) < 1e-8


def test_pearson_residual_rejects_endpoints():
    with pytest.raises(EndpointEvaluation):
        pearson_residual(scalar_jacobi(0.0, 0.0), 1e-4)


def test_non_polynomial_pearson_data_is_detected():
    # H^L = diag(1, 1 + 1.5 z): the logarithmic derivative has a pole at z = -2/3
    w = PearsonWeight(alpha=np.diag([0.5, 0.0]), beta=np.zeros((2, 2)), W0L=np.eye(2), W0R=np.eye(2),
                      HL=[np.eye(2), np.diag([0.0, 1.5])], HR=[np.eye(2)])
    with pytest.raises(NotPolynomial):
        derive_h_from_factors(w)


@pytest.mark.parametrize("kw,msg", [
    (dict(alpha=[[-1.0]]), "alpha"),
    (dict(beta=[[-1.2]]), "beta"),
    (dict(W0L=[[0.0]]), "W0L"),
    (dict(HL=[[[1.0]], [[-1.0]]]), "H\\^L"),
])
def test_invalid_weights_are_rejected(kw, msg):
    base = dict(alpha=[[0.0]], beta=[[0.0]], W0L=[[1.0]], W0R=[[1.0]], HL=[[[1.0]]], HR=[[[1.0]]])
    base.update(kw)
    with pytest.raises(WeightError, match=msg):
        PearsonWeight(**base)


def test_poly_helpers():
    c = np.array([[[1.0]], [[2.0]], [[0.0]]])
    assert poly_degree(c) == 1
    assert abs(poly_eval(c, 3.0)[0, 0] - 7.0) < 1e-15


@settings(max_examples=25, deadline=None)
@given(a=st.floats(-0.9, 3.0), b=st.floats(-0.9, 3.0), c=st.floats(-2.0, 2.0), t=st.floats(0.05, 0.95))
def test_pearson_equation_property(a, b, c, t):
    assert pearson_residual(scalar_jacobi(a, b, c), t) < 1e-7


def test_branch_values():
    assert abs(scalar_jacobi(0.5, 0.0).eval_WL(4.0)[0, 0] - 2.0) < 1e-15
    assert np.allclose(nilpotent_alpha().eval_WL(math.e), [[1, 1], [0, 1]], atol=1e-15)
    assert abs(scalar_jacobi(1.0, 1.0).eval_W(0.5)[0, 0] - 0.25) < 1e-16


def test_factor_consistency_at_random_points():
    w = WEIGHTS["noncommuting"]()
    rng = np.random.default_rng(3)
    for t in rng.uniform(0.01, 0.99, 50):
        ref = w.eval_WL(t) @ w.eval_WR(t)
        assert np.linalg.norm(w.eval_W(t) - ref) < 1e-12 * np.linalg.norm(ref)


def test_block_diagonal_matches_scalar_entries():
    w = diagonal_jacobi([0.0, 0.5], [0.25, 1.0])
    t = 0.37
    assert abs(w.eval_W(t)[0, 0] - (1 - t) ** 0.25) < 1e-15
    assert abs(w.eval_W(t)[1, 1] - t**0.5 * (1 - t)) < 1e-15


def test_h_for_unipotent_polynomial_factor():
    e12 = np.array([[0.0, 1.0], [0.0, 0.0]])
    w = PearsonWeight(alpha=np.zeros((2, 2)), beta=np.zeros((2, 2)), W0L=np.eye(2), W0R=np.eye(2),
                      HL=[np.eye(2), e12], HR=[np.eye(2)])
    z = 0.2
    # (1 - z) z E12 (I + z E12)^-1 = (1 - z) z E12
    assert np.allclose(poly_eval(w.hL, z), (1 - z) * z * e12, atol=1e-12)


def test_h_for_scalar_matrix_exponent():
    w = PearsonWeight(alpha=0.3 * np.eye(2), beta=np.zeros((2, 2)), W0L=[[1.0, 2.0], [0.0, 1.0]], W0R=np.eye(2),
                      HL=[np.eye(2)], HR=[np.eye(2)])
    assert np.allclose(w.hL, [0.3 * np.eye(2), -0.3 * np.eye(2)], atol=1e-12)


@pytest.mark.parametrize("name", sorted(WEIGHTS))
def test_pearson_on_twenty_points(name):
    w = WEIGHTS[name]()
    assert max(pearson_residual(w, t) for t in np.linspace(0.02, 0.98, 20)) < 1e-7


def test_constant_weight_has_zero_pearson_residual():
    w = scalar_jacobi(0.0, 0.0)
    assert pearson_residual(w, 0.4) < 1e-12
    assert poly_degree(w.hL) == 0 and abs(w.hL[0, 0, 0]) < 1e-14
