"""Complex dense matrix helpers and matrix functions.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  A 2x2 block
matrix (the shape of the fundamental, transfer and structure matrices) is a
``(2N, 2N)`` array; :func:`block2` and :func:`blocks` convert between the
block and flat views.

Matrix exponentials use :func:`scipy.linalg.expm` (Pade approximation with
scaling and squaring).  The matrix logarithm is computed here: through the
eigendecomposition when the matrix is safely diagonalizable, otherwise by
inverse scaling and squaring followed by the truncated series of log(I + X).
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.linalg as sla

TWO_PI = 2.0 * math.pi

Side = Literal["above", "below"]


class LinalgError(ArithmeticError):
    """Base class for failures of the dense linear algebra layer."""


class Singular(LinalgError):
    """A pivot vanished during factorization."""


class IllConditioned(LinalgError):
    """The condition estimate exceeds the configured bound."""

    def __init__(self, cond: float, bound: float):
        super().__init__(f"condition estimate {cond:.3e} exceeds bound {bound:.1e}")
        self.cond = cond
        self.bound = bound


class BranchCut(LinalgError):
    """An eigenvalue sits on the cut of the principal logarithm."""


class ZeroBase(LinalgError):
    """A power z**alpha was requested at z = 0."""


def as_cmat(a, *, allow_nonfinite: bool = False) -> np.ndarray:
    """Coerce ``a`` to a 2-D complex128 array and validate it."""
    m = np.array(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not allow_nonfinite and not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def block2(a, b, c, d) -> np.ndarray:
    """Assemble ``[[a, b], [c, d]]`` from four N x N blocks."""
    n = a.shape[-1]
    for blk in (b, c, d):
        if blk.shape[-2:] != (n, n):
            raise ValueError("all four blocks must share the same size")
    return np.block([[a, b], [c, d]])


def blocks(m: np.ndarray):
    """Split a ``(2N, 2N)`` array into its four N x N blocks."""
    n2 = m.shape[-1]
    if n2 % 2 or m.shape[-2] != n2:
        raise ValueError(f"not a 2x2 block matrix: shape {m.shape}")
    n = n2 // 2
    return m[..., :n, :n], m[..., :n, n:], m[..., n:, :n], m[..., n:, n:]


def symplectic_j(n: int, dtype=complex) -> np.ndarray:
    """``[[0, -I], [I, 0]]`` of total size 2n."""
    z = np.zeros((n, n), dtype=dtype)
    i = np.eye(n, dtype=dtype)
    return np.block([[z, -i], [i, z]])


def fro(a) -> float:
    """Frobenius norm; works for complex128 and mpmath object arrays."""
    a = np.asarray(a)
    if a.dtype == object:
        return float(sum(abs(x) ** 2 for x in a.ravel()) ** 0.5)
    return float(np.linalg.norm(a.ravel()))


def mat_mul(a, b) -> np.ndarray:
    """Matrix product with exactly rounded summation of each entry.

    The entrywise products are formed in double precision and every inner
    product is accumulated with :func:`math.fsum` on its real and imaginary
    parts separately.
    """
    a = as_cmat(a)
    b = as_cmat(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    out = np.empty((a.shape[0], b.shape[1]), dtype=complex)
    for i in range(a.shape[0]):
        ar, ai = a[i].real, a[i].imag
        for j in range(b.shape[1]):
            br, bi = b[:, j].real, b[:, j].imag
            re = math.fsum(np.concatenate((ar * br, -(ai * bi))))
            im = math.fsum(np.concatenate((ar * bi, ai * br)))
            out[i, j] = complex(re, im)
    return out


def cond1(a) -> float:
    """1-norm condition number; ``inf`` for exactly singular input."""
    a = as_cmat(a)
    try:
        return float(np.linalg.cond(a, 1))
    except np.linalg.LinAlgError:
        return math.inf


def mat_inv(a, max_cond: float = 1e12) -> np.ndarray:
    """Inverse through a partially pivoted LU factorization.

    Raises
    ------
    Singular
        If a pivot has magnitude below 1e-300.
    IllConditioned
        If the 1-norm condition estimate exceeds ``max_cond``.
    """
    a = as_cmat(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"mat_inv needs a square matrix, got {a.shape}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)  # zero pivots are reported below
        lu, piv = sla.lu_factor(a, check_finite=False)
    if np.min(np.abs(np.diag(lu))) < 1e-300:
        raise Singular("zero pivot in LU factorization")
    inv = sla.lu_solve((lu, piv), np.eye(a.shape[0], dtype=complex))
    cond = np.linalg.norm(a, 1) * np.linalg.norm(inv, 1)
    if not np.isfinite(cond) or cond > max_cond:
        raise IllConditioned(float(cond), max_cond)
    return inv


def mat_exp(a) -> np.ndarray:
    """Matrix exponential (scaling and squaring with Pade approximants).

    Accepts a stack of matrices with shape ``(..., n, n)``.
    """
    return sla.expm(np.asarray(a, dtype=complex))


def _on_negative_axis(lam: complex) -> bool:
    return lam.real <= 0.0 and abs(lam.imag) <= 1e-14 * max(1.0, abs(lam))


def _diagonalize(a: np.ndarray, gap: float = 1e-8, max_cond: float = 1e8):
    """Return (eigenvalues, V, V^-1) or None if ``a`` is not safely diagonalizable."""
    lam, v = np.linalg.eig(a)
    n = lam.size
    scale = max(1.0, float(np.max(np.abs(lam))))
    for i in range(n):
        for j in range(i + 1, n):
            if abs(lam[i] - lam[j]) < gap * scale:
                return None
    if np.linalg.cond(v) > max_cond:
        return None
    return lam, v, np.linalg.inv(v)


def mat_log(a, max_degree: int = 64) -> np.ndarray:
    """Principal matrix logarithm.

    Diagonalizable input with an eigenvalue gap above 1e-8 goes through the
    eigendecomposition.  Otherwise square roots are taken until the matrix
    is within 0.25 of the identity, and the series of ``log(I + X)`` is
    summed; more than ``max_degree`` terms is a hard failure.
    """
    a = as_cmat(a)
    n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError("mat_log needs a square matrix")
    lam = np.linalg.eigvals(a)
    if any(_on_negative_axis(complex(x)) for x in lam):
        raise BranchCut("eigenvalue on the closed negative real axis")
    dec = _diagonalize(a)
    if dec is not None:
        lam, v, vi = dec
        return (v * np.log(lam)) @ vi
    eye = np.eye(n, dtype=complex)
    x = a.copy()
    k = 0
    while np.linalg.norm(x - eye, 1) > 0.25:
        x = sla.sqrtm(x)
        k += 1
        if k > 60:
            raise LinalgError("square-root iteration did not approach the identity")
    d = x - eye
    term = d.copy()
    acc = d.copy()
    for j in range(2, max_degree + 1):
        term = -term @ d * ((j - 1) / j)
        acc = acc + term
        if np.linalg.norm(term, 1) <= 1e-17 * max(1.0, np.linalg.norm(acc, 1)):
            break
    else:
        raise LinalgError(f"log series did not converge within degree {max_degree}")
    return acc * (2.0**k)


@dataclass(frozen=True)
class BranchSpec:
    """Determination of ``log z`` with the cut on ``[0, +inf)``.

    ``arg z`` ranges over ``(0, 2*pi)``.  Points on the positive real axis
    take the limit from ``side``: ``above`` gives arg 0, ``below`` gives 2*pi.
    """

    side: Side = "above"

    def __post_init__(self):
        if self.side not in ("above", "below"):
            raise ValueError(f"side must be 'above' or 'below', got {self.side!r}")

    def log(self, z: complex) -> complex:
        z = complex(z)
        if z == 0:
            raise ZeroBase("log of zero")
        arg = cmath.phase(z)
        if arg < 0:
            arg += TWO_PI
        if z.imag == 0.0 and z.real > 0:
            arg = 0.0 if self.side == "above" else TWO_PI
        return complex(math.log(abs(z)), arg)


def log_cut_positive(z, side: Side = "above"):
    """Vectorized ``log z`` with arg in (0, 2*pi); see :class:`BranchSpec`."""
    z = np.asarray(z, dtype=complex)
    arg = np.angle(z)
    arg = np.where(arg < 0, arg + TWO_PI, arg)
    on_axis = (z.imag == 0) & (z.real > 0)
    arg = np.where(on_axis, 0.0 if side == "above" else TWO_PI, arg)
    return np.log(np.abs(z)) + 1j * arg


def log_one_minus(z, side: Side = "above"):
    """Principal ``log(1 - z)``, cut on ``[1, +inf)``.

    For real ``z > 1`` the value is the limit from ``side``: from above,
    ``1 - z`` approaches the negative axis from below (arg -pi).
    """
    z = np.asarray(z, dtype=complex)
    w = 1.0 - z
    out = np.log(w)
    on_cut = (z.imag == 0) & (z.real > 1)
    fix = np.log(np.abs(w)) + 1j * (-math.pi if side == "above" else math.pi)
    return np.where(on_cut, fix, out)


def mat_pow_scalar(z: complex, alpha, branch: BranchSpec | None = None) -> np.ndarray:
    """``z**alpha = exp(alpha * log z)`` under the (0, 2*pi) determination."""
    alpha = as_cmat(alpha)
    if complex(z) == 0:
        raise ZeroBase("z**alpha is undefined at z = 0")
    branch = branch or BranchSpec()
    return mat_exp(alpha * branch.log(z))


def pow_stack(logs: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """``exp(alpha * L)`` for every scalar ``L`` in ``logs``; shape ``(len, n, n)``.

    Uses the eigendecomposition of ``alpha`` when it is safely
    diagonalizable, batched ``expm`` otherwise.
    """
    logs = np.asarray(logs, dtype=complex).ravel()
    alpha = as_cmat(alpha)
    if not np.any(alpha):
        return np.broadcast_to(np.eye(alpha.shape[0], dtype=complex), (logs.size,) + alpha.shape).copy()
    dec = _diagonalize(alpha, max_cond=1e6)
    if dec is not None:
        lam, v, vi = dec
        e = np.exp(np.outer(logs, lam))
        return np.einsum("ij,kj,jl->kil", v, e, vi)
    return mat_exp(alpha[None, :, :] * logs[:, None, None])
