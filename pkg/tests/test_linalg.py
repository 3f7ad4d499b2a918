import cmath
import math

import numpy as np
import pytest

from jacobi_mop.linalg import (BranchCut, BranchSpec, IllConditioned, Singular, ZeroBase, block2, blocks,
                               log_cut_positive, log_one_minus, mat_exp, mat_inv, mat_log, mat_mul,
                               mat_pow_scalar, pow_stack, symplectic_j)

rng = np.random.default_rng(20261015)


def crandn(*shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


class TestMatMul:
    def test_identity(self):
        a = crandn(3, 3)
        assert np.array_equal(mat_mul(np.eye(3), a), a)

    def test_nilpotent_square(self):
        e = np.array([[0, 1], [0, 0]])
        assert np.array_equal(mat_mul(e, e), np.zeros((2, 2)))

    def test_against_triple_loop(self):
        a, b = crandn(3, 3), crandn(3, 3)
        naive = np.array([[sum(a[i, k] * b[k, j] for k in range(3)) for j in range(3)] for i in range(3)])
        assert np.max(np.abs(mat_mul(a, b) - naive)) < 1e-14

    def test_associativity(self):
        a, b, c = crandn(5, 5), crandn(5, 5), crandn(5, 5)
        lhs = mat_mul(mat_mul(a, b), c)
        rhs = mat_mul(a, mat_mul(b, c))
        assert np.linalg.norm(lhs - rhs) / np.linalg.norm(lhs) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            mat_mul(np.ones((2, 3)), np.ones((2, 3)))

    def test_compensated_sum_is_exact_on_cancellation(self):
        a = np.array([[1e16, 1.0, -1e16]])
        b = np.ones((3, 1))
        assert mat_mul(a, b)[0, 0] == 1.0


class TestMatInv:
    def test_identity(self):
        assert np.allclose(mat_inv(np.eye(3)), np.eye(3), atol=0)

    def test_diagonal(self):
        assert np.array_equal(mat_inv(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]))

    def test_random_residual(self):
        a = crandn(4, 4) + 4 * np.eye(4)
        assert np.linalg.norm(a @ mat_inv(a) - np.eye(4)) < 1e-12

    def test_singular(self):
        with pytest.raises(Singular):
            mat_inv(np.zeros((2, 2)))

    def test_ill_conditioned_carries_estimate(self):
        with pytest.raises(IllConditioned) as info:
            mat_inv(np.diag([1.0, 1e-13]))
        assert info.value.cond > 1e12


class TestMatLog:
    def test_identity(self):
        assert np.allclose(mat_log(np.eye(3)), 0, atol=1e-15)

    def test_diagonal(self):
        assert np.allclose(mat_log(np.diag([math.e, math.e**2])), np.diag([1.0, 2.0]), atol=1e-14)

    def test_round_trip_right_half_plane(self):
        q, _ = np.linalg.qr(crandn(4, 4))
        lam = rng.uniform(0.5, 2, 4) + 1j * rng.uniform(-1, 1, 4)
        a = q @ np.diag(lam) @ q.conj().T
        assert np.linalg.norm(mat_exp(mat_log(a)) - a) / np.linalg.norm(a) < 1e-10

    def test_jordan_block(self):
        a = np.array([[2.0, 1.0], [0.0, 2.0]])
        assert np.linalg.norm(mat_exp(mat_log(a)) - a) < 1e-12

    def test_branch_cut(self):
        with pytest.raises(BranchCut):
            mat_log(np.diag([1.0, -2.0]))


class TestPow:
    def test_zero_exponent(self):
        assert np.allclose(mat_pow_scalar(-3 + 2j, np.zeros((2, 2))), np.eye(2))

    def test_diagonal_positive_real(self):
        assert np.allclose(mat_pow_scalar(4.0, np.diag([0.5, 1.0])), np.diag([2.0, 4.0]), atol=1e-14)

    def test_nilpotent_series(self):
        a = np.array([[0, 1], [0, 0]])
        assert np.allclose(mat_pow_scalar(math.e, a), [[1, 1], [0, 1]], atol=1e-15)

    def test_zero_base(self):
        with pytest.raises(ZeroBase):
            mat_pow_scalar(0.0, np.eye(2))

    def test_inverse_pair(self):
        a = crandn(3, 3) * 0.3
        z = -0.7 + 0.2j
        assert np.linalg.norm(mat_pow_scalar(z, a) @ mat_pow_scalar(z, -a) - np.eye(3)) < 1e-10

    def test_commuting_exponents_add(self):
        m = crandn(3, 3) * 0.3
        a, g = m, 0.5 * m @ m + 0.2 * np.eye(3)
        z = 0.4 + 1.1j
        lhs = mat_pow_scalar(z, a) @ mat_pow_scalar(z, g)
        assert np.linalg.norm(lhs - mat_pow_scalar(z, a + g)) / np.linalg.norm(lhs) < 1e-9

    def test_branch_jump_on_positive_axis(self):
        a = crandn(2, 2) * 0.3
        t = 0.37
        above = mat_pow_scalar(t, a, BranchSpec("above"))
        below = mat_pow_scalar(t, a, BranchSpec("below"))
        assert np.linalg.norm(below - above @ mat_exp(2j * math.pi * a)) < 1e-9

    def test_branch_arg_range(self):
        assert BranchSpec().log(-1.0).imag == pytest.approx(math.pi)
        assert BranchSpec().log(-1j).imag == pytest.approx(1.5 * math.pi)
        assert BranchSpec("below").log(2.0).imag == pytest.approx(2 * math.pi)
        with pytest.raises(ValueError):
            BranchSpec("left")

    def test_vectorized_logs_match_scalar(self):
        zs = np.array([-1.0, 1j, 0.5 - 0.5j, 3.0])
        ref = [BranchSpec().log(z) for z in zs]
        assert np.allclose(log_cut_positive(zs), ref)
        assert np.allclose(log_one_minus(np.array([0.5j, -2.0])), [cmath.log(1 - 0.5j), math.log(3)])
        assert log_one_minus(np.array([3.0]))[0].imag == pytest.approx(-math.pi)

    def test_pow_stack_matches_expm(self):
        a = np.array([[0.5, 1.0], [0.0, 0.25]])
        logs = log_cut_positive(np.array([0.3, -1 + 1j]))
        ref = np.array([mat_exp(a * l) for l in logs])
        assert np.allclose(pow_stack(logs, a), ref, atol=1e-14)
        nil = np.array([[0, 1], [0, 0]])
        assert np.allclose(pow_stack(logs, nil), np.array([mat_exp(nil * l) for l in logs]))


def test_block_helpers():
    a, b, c, d = (np.full((2, 2), k, dtype=complex) for k in range(4))
    m = block2(a, b, c, d)
    for x, y in zip(blocks(m), (a, b, c, d)):
        assert np.array_equal(x, y)
    j = symplectic_j(2)
    assert np.array_equal(j @ j, -np.eye(4))
    with pytest.raises(ValueError):
        block2(a, b, c, np.zeros((3, 3)))
