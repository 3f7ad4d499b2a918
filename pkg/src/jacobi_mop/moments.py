"""Block moments ``W_n = int_0^1 t**n W(t) dt`` and block Hankel regularity.

Two independent routes are provided: tanh-sinh quadrature (any weight) and
a semi-analytic expansion into Beta / confluent hypergeometric integrals,
available when both exponents are diagonalizable.
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from . import precision as prec
from .quadrature import DEFAULT_STEPS, QuadratureNotConverged, tanh_sinh, tanh_sinh_mp
from .weights import PearsonWeight

QUADRATURE = "quadrature"
SEMI_ANALYTIC = "semi-analytic"

# relative sigma_min / sigma_max below which a block Hankel matrix counts as singular
DEFAULT_REGULARITY = {prec.DOUBLE: 1e-13, prec.DD: 1e-26}


@dataclass(frozen=True, eq=False)
class MomentTable:
    """Moments ``W_0 .. W_{2 n_max + 1}`` of an N x N weight.

    ``moments`` is complex128 in double mode and an object array of
    ``mpmath.mpc`` in double-double mode, with shape ``(2 n_max + 2, N, N)``.
    """

    N: int
    n_max: int
    moments: np.ndarray
    method: str
    est_error: np.ndarray
    precision: str = prec.DOUBLE

    def __post_init__(self):
        if self.moments.shape != (2 * self.n_max + 2, self.N, self.N):
            raise ValueError(f"moment array has shape {self.moments.shape}")

    def __getitem__(self, k):
        return self.moments[k]

    def __len__(self):
        return self.moments.shape[0]

    def scaled(self, c: complex) -> "MomentTable":
        m = self.moments * (prec.to_dd(np.array(c)).item() if self.precision == prec.DD else complex(c))
        return MomentTable(self.N, self.n_max, m, self.method, self.est_error * abs(c), self.precision)

    def to_double(self) -> "MomentTable":
        return MomentTable(self.N, self.n_max, prec.to_double(self.moments), self.method,
                           self.est_error, prec.DOUBLE)


def _level_estimates_double(w: PearsonWeight, count: int, steps) -> np.ndarray:
    rule = tanh_sinh(tuple(steps))
    vals = w.W_nodes(rule.t, rule.s)  # (nodes, N, N)
    powers = rule.t[:, None] ** np.arange(count)[None, :]  # (nodes, count)
    out = []
    for wl in rule.weights:
        sel = wl != 0
        out.append(np.einsum("k,kn,kij->nij", wl[sel], powers[sel], vals[sel]))
    return np.array(out)


def _level_estimates_dd(w: PearsonWeight, count: int, steps) -> np.ndarray:
    ts, ss, ws = tanh_sinh_mp(tuple(steps), prec.DD_BITS)
    n = w.N
    with prec.dd_context():
        vals = w.W_nodes_mp(ts, ss).reshape(len(ts), n * n)
        out = np.empty((len(ws), count, n, n), dtype=object)
        for lev, wl in enumerate(ws):
            idx = [i for i, x in enumerate(wl) if x != 0]
            coef = np.array([wl[i] for i in idx], dtype=object)
            tt = np.array([ts[i] for i in idx], dtype=object)
            v = vals[idx]
            tn = np.array([mpmath.mpf(1)] * len(idx), dtype=object)
            for k in range(count):
                out[lev, k] = np.dot(coef * tn, v).reshape(n, n)
                tn = tn * tt
    return out


def moments_quadrature(w: PearsonWeight, n_max: int, precision: str = prec.DOUBLE,
                       steps=DEFAULT_STEPS, tol: float | None = None) -> MomentTable:
    """Moments by nested tanh-sinh quadrature.

    The error estimate of each moment is the Frobenius norm of the
    difference between the two finest levels, relative to the moment.

    Raises
    ------
    QuadratureNotConverged
        If some estimate exceeds ``tol`` (default ``1e-12`` in double,
        ``1e-25`` in double-double).
    """
    prec.check(precision)
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    count = 2 * n_max + 2
    if precision == prec.DOUBLE:
        lev = _level_estimates_double(w, count, steps)
        tol = 1e-12 if tol is None else tol
    else:
        lev = _level_estimates_dd(w, count, steps)
        tol = 1e-25 if tol is None else tol
    best = lev[-1]
    err = np.array([prec.norm(lev[-1][k] - lev[-2][k]) / max(prec.norm(best[k]), 1e-300)
                    for k in range(count)])
    if np.max(err) > tol:
        worst = int(np.argmax(err))
        raise QuadratureNotConverged(
            f"moment {worst} did not converge: level difference {err[worst]:.2e} > {tol:.1e}",
            worst=float(err[worst]))
    return MomentTable(w.N, n_max, best, QUADRATURE, err, precision)


def _diag_split(a: np.ndarray, max_cond: float = 1e6):
    lam, v = np.linalg.eig(a)
    if np.linalg.cond(v) > max_cond:
        return None
    return lam, v, np.linalg.inv(v)


def semi_analytic_available(w: PearsonWeight) -> bool:
    return _diag_split(w.alpha) is not None and _diag_split(w.beta) is not None


def moments_semi_analytic(w: PearsonWeight, n_max: int, precision: str = prec.DOUBLE) -> MomentTable:
    """Moments through scalar Beta and confluent hypergeometric integrals.

    With ``alpha = sum_i a_i E_i`` and ``beta = sum_j b_j F_j`` (spectral
    projectors) every entry reduces to

        int_0^1 t**(m + a_i) (1 - t)**b_j exp(c t) dt
            = B(m + a_i + 1, b_j + 1) 1F1(m + a_i + 1; m + a_i + b_j + 2; c).

    Eigen-decompositions are done in double precision, so the result is an
    independent cross-check rather than a double-double oracle unless the
    exponents are diagonal.
    """
    prec.check(precision)
    da, db = _diag_split(w.alpha), _diag_split(w.beta)
    if da is None or db is None:
        raise ValueError("semi-analytic moments need diagonalizable alpha and beta")
    n = w.N
    count = 2 * n_max + 2
    # exact projectors when the exponent is already diagonal
    def projectors(a, dec):
        if not np.any(a - np.diag(np.diag(a))):
            lam = np.diag(a)
            ps = []
            for i in range(n):
                e = np.zeros((n, n), dtype=complex)
                e[i, i] = 1
                ps.append(e)
            return lam, ps
        lam, v, vi = dec
        return lam, [np.outer(v[:, i], vi[i]) for i in range(n)]

    lam_a, pa = projectors(w.alpha, da)
    lam_b, pb = projectors(w.beta, db)
    k0 = w.W0L @ w.W0R
    c = w.cL + w.cR
    bits = prec.DD_BITS if precision == prec.DD else 80
    out = np.empty((count, n, n), dtype=object)
    with mpmath.workprec(bits):
        mc = mpmath.mpc(c)
        # coefficient matrices (as mp) of t**(k+l) for each (i, j) pair
        terms = {}
        for k, pk in enumerate(w.HL):
            for l, ql in enumerate(w.HR):
                for i in range(n):
                    for j in range(n):
                        mat = pk @ pa[i] @ k0 @ pb[j] @ ql
                        if np.any(mat):
                            terms.setdefault((k + l, i, j), np.zeros((n, n), dtype=complex))
                            terms[(k + l, i, j)] += mat
        mp_terms = [(s, i, j, prec.to_dd(mat)) for (s, i, j), mat in terms.items()]
        for m in range(count):
            acc = np.array([[mpmath.mpc(0)] * n for _ in range(n)], dtype=object)
            for s, i, j, mat in mp_terms:
                a = mpmath.mpc(m + s + 1) + mpmath.mpc(lam_a[i])
                b = mpmath.mpc(lam_b[j]) + 1
                val = mpmath.beta(a, b)
                if mc != 0:
                    val *= mpmath.hyp1f1(a, a + b, mc)
                acc = acc + mat * val
            out[m] = acc
        if precision == prec.DOUBLE:
            out = prec.to_double(out)
    est = np.zeros(count)
    return MomentTable(n, n_max, out, SEMI_ANALYTIC, est, precision)


def compute_moments(w: PearsonWeight, n_max: int, precision: str = prec.DOUBLE,
                    method: str = QUADRATURE, tol: float | None = None) -> MomentTable:
    """Moment table of ``w`` up to index ``2 n_max + 1``.

    ``method`` is ``"quadrature"``, ``"semi-analytic"`` or ``"auto"`` (the
    semi-analytic route whenever it applies).
    """
    if method == "auto":
        method = SEMI_ANALYTIC if semi_analytic_available(w) else QUADRATURE
    if method == SEMI_ANALYTIC:
        return moments_semi_analytic(w, n_max, precision)
    if method == QUADRATURE:
        return moments_quadrature(w, n_max, precision, tol=tol)
    raise ValueError(f"unknown moment method {method!r}")


def block_hankel(table: MomentTable, n: int, shift: int = 0) -> np.ndarray:
    """``[W_{j+k+shift}]_{j,k=0..n}`` as an ``(n+1)N x (n+1)N`` array."""
    if 2 * n + shift >= len(table):
        raise ValueError(f"table too short for a Hankel matrix of block order {n}")
    rows = [np.concatenate([table[j + k + shift] for k in range(n + 1)], axis=1) for j in range(n + 1)]
    return np.concatenate(rows, axis=0)


def hankel_regularity(table: MomentTable, n: int, threshold: float | None = None):
    """``(is_regular, sigma_min)`` of the block Hankel matrix of order ``n``.

    Regular means ``sigma_min > threshold * sigma_max``; the default
    threshold depends on the table precision (see ``DEFAULT_REGULARITY``).
    """
    if threshold is None:
        threshold = DEFAULT_REGULARITY[table.precision]
    sv = prec.singular_values(block_hankel(table, n))
    smax, smin = float(np.max(sv)), float(np.min(sv))
    return bool(smin > threshold * smax), smin
