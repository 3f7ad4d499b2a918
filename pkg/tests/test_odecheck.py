import numpy as np
import pytest

from jacobi_mop import precision as prec
from jacobi_mop.odecheck import (DegenerateParameters, first_order_residual, mt_and_derivative, n_map,
                                 n_map_poly, pole_matching_residual, scalar_jacobi_ode_coefficients,
                                 scalar_jacobi_ode_residual, scalar_pole_matching, scalar_q_ode_residual,
                                 second_order_residual, split_relation_residual)
from jacobi_mop.pipeline import Pipeline
from jacobi_mop.weights import scalar_jacobi

from conftest import OFF_CUT, SHIPPED, pipeline


def test_n_map_scalar():
    z = 0.3 + 0.2j
    f, df = np.array([[z]]), np.array([[1.0]])
    assert abs(n_map(f, df, z)[0, 0] - (1 + z / (1 - z))) < 1e-15


def test_n_map_order_of_square_and_division():
    z = -0.4 + 0.7j
    f = np.array([[1.0, 2.0], [0.5, -1.0]]) * z
    df = np.array([[1.0, 2.0], [0.5, -1.0]])
    assert np.allclose(n_map(f, df, z), df + f @ f / (z * (1 - z)))


def test_n_map_poly_blocks():
    c = np.zeros((2, 4, 4), dtype=complex)
    c[1] = np.arange(16).reshape(4, 4)
    res = n_map_poly(c, [0.5j, -1.0])
    assert res.N.shape == (2, 4, 4)
    assert np.allclose(res.H(1, 2), res.N[:, :2, 2:])
    assert np.allclose(res.dF[0], c[1])


@pytest.mark.parametrize("name", SHIPPED)
def test_first_order_equations(name):
    pl = pipeline(name)
    for n in (1, 2, 4):
        rep = first_order_residual(pl, n, OFF_CUT)
        assert rep.passed, rep.summary()


@pytest.mark.parametrize("name", SHIPPED)
def test_second_order_equations(name):
    pl = pipeline(name)
    for n in (1, 3, 4):
        rep = second_order_residual(pl, n, OFF_CUT)
        assert rep.passed, rep.summary()


def test_numeric_structure_derivative_fallback():
    pl = pipeline("noncommuting")
    z = 0.5 + 0.5j
    m, dm = mt_and_derivative(pl, 2, z)
    from jacobi_mop.rh import structure_matrix_numeric
    h = 1e-3
    fd = (structure_matrix_numeric(pl, z + h, 2) - structure_matrix_numeric(pl, z - h, 2)) / (2 * h)
    assert np.linalg.norm(dm - fd) < 1e-5 * np.linalg.norm(dm)


@pytest.mark.parametrize("name", ["legendre", "jacobi_exp", "nilpotent", "noncommuting"])
def test_split_relations(name):
    pl = pipeline(name)
    grid = np.linspace(0.05, 0.95, 7)
    for n in (1, 3):
        rep = split_relation_residual(pl, n, grid, OFF_CUT)
        assert rep.passed, rep.summary()


@pytest.mark.parametrize("a", [0.0, 0.5, 1.0])
@pytest.mark.parametrize("b", [0.0, 0.5, 1.0])
def test_scalar_jacobi_equation(a, b):
    s = Pipeline.build(scalar_jacobi(a, b), 6, prec.DD, method="semi-analytic").sys
    assert max(scalar_jacobi_ode_residual(s, a, b, n) for n in range(7)) < 1e-20


def test_scalar_equation_detects_wrong_parameters():
    s = Pipeline.build(scalar_jacobi(0.5, 1.0), 4, prec.DD, method="semi-analytic").sys
    assert scalar_jacobi_ode_residual(s, 0.5, 0.9, 3) > 1e-3


def test_scalar_equation_needs_n_equal_one():
    with pytest.raises(ValueError):
        scalar_jacobi_ode_residual(pipeline("nilpotent").sys, 0.0, 0.0, 2)


def test_scalar_ode_coefficients_of_legendre_p1():
    # P_1 = t - 1/2 for a = b = 0: (1 - 2t) P_1' + 2 P_1 vanishes identically
    res, scale = scalar_jacobi_ode_coefficients([-0.5, 1.0], 0.0, 0.0, 1)
    assert max(abs(r) for r in res) == 0 and max(scale) > 0


@pytest.mark.parametrize("n", [1, 2, 4])
def test_second_kind_scalar_equation(n):
    pl = pipeline("jacobi")
    assert max(scalar_q_ode_residual(pl, 0.5, 1.0, n, z) for z in OFF_CUT) < 1e-9


@pytest.mark.parametrize("a,b", [(0.0, 0.0), (0.5, 1.0), (1.0, 0.5)])
def test_pole_matching(a, b):
    s = Pipeline.build(scalar_jacobi(a, b), 6, prec.DD, method="semi-analytic").sys
    assert max(pole_matching_residual(s, a, b, n) for n in range(1, 6)) < 1e-12


def test_pole_matching_legendre_values():
    p1, g = scalar_pole_matching(0.0, 0.0, 3)
    assert p1 == pytest.approx(-1.5)
    assert g == pytest.approx(9 / (4 * 35))


@pytest.mark.parametrize("a,b,n", [(0.0, 0.0, 0), (-0.5, -0.5, 1), (-0.5, -0.5, 0)])
def test_pole_matching_degenerate(a, b, n):
    with pytest.raises(DegenerateParameters):
        scalar_pole_matching(a, b, n)
