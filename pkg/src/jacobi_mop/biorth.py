"""Monic left/right biorthogonal matrix polynomials from block moments.

For every degree ``n`` the coefficients of ``P_n^L(t) = sum_j a_j t**j``
(``a_n = I``) solve the block Hankel system ``sum_j a_j W_{j+k} = 0`` for
``k < n``; the right family solves the transposed arrangement.  Then

    C_n^-1 = <P_n^L, t**n>,  beta_n^L = p^1_{L,n} - p^1_{L,n+1},
    gamma_n^L = C_n^-1 C_{n-1},  gamma_n^R = C_{n-1} C_n^-1.

Coefficient arrays are stored highest degree first: ``PL[n][k]`` is the
coefficient of ``z**(n-k)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import precision as prec
from .linalg import IllConditioned
from .moments import DEFAULT_REGULARITY, MomentTable, block_hankel
from .report import ResidualReport

DEFAULT_MAX_COND = {prec.DOUBLE: 1e14, prec.DD: 1e28}


class HankelSingular(ArithmeticError):
    def __init__(self, n: int, ratio: float):
        super().__init__(f"block Hankel matrix of order {n} is numerically singular "
                         f"(sigma_min/sigma_max = {ratio:.2e})")
        self.n = n
        self.ratio = ratio


@dataclass(frozen=True, eq=False)
class BiorthSystem:
    """Biorthogonal system up to degree ``n_max`` (polynomials to ``n_max + 1``)."""

    N: int
    n_max: int
    PL: list
    PR: list
    C: list
    Cinv: list
    betaL: list
    betaR: list
    gammaL: list
    gammaR: list
    precision: str = prec.DOUBLE

    def p(self, side: str, n: int, k: int):
        """``p^k_{side,n}``: coefficient of ``z**(n-k)``; zero when ``k > n``."""
        polys = self.PL if side == "L" else self.PR
        if k > n:
            return prec.zeros((self.N, self.N), self.precision)
        return polys[n][k]

    def ascending(self, side: str, n: int) -> np.ndarray:
        return (self.PL if side == "L" else self.PR)[n][::-1]

    def eval_P(self, side: str, n: int, z, horner: bool = False) -> np.ndarray:
        """Value of ``P_n`` at a scalar or an array of points (double precision).

        By default the three term recurrence is run forward from
        ``P_0 = I``, which is far better conditioned on [0, 1] than Horner's
        rule on the monomial coefficients; ``horner=True`` uses the latter.
        """
        z = np.asarray(z, dtype=complex)
        shape = z.shape + (self.N, self.N)
        if n < 0:
            return np.zeros(shape, dtype=complex)
        if horner:
            c = prec.to_double((self.PL if side == "L" else self.PR)[n])
            out = np.zeros(shape, dtype=complex)
            for blk in c:
                out = out * z[..., None, None] + blk
            return out
        return self.eval_P_all(side, n, z)[n]

    def eval_P_all(self, side: str, n: int, z) -> list:
        """``[P_0(z), ..., P_n(z)]`` by the three term recurrence."""
        z = np.asarray(z, dtype=complex)
        eye = np.broadcast_to(np.eye(self.N, dtype=complex), z.shape + (self.N, self.N))
        zz = z[..., None, None]
        out = [eye.copy()]
        prev = np.zeros_like(out[0])
        for k in range(n):
            b = prec.to_double(self.betaL[k] if side == "L" else self.betaR[k])
            g = prec.to_double(self.gammaL[k] if side == "L" else self.gammaR[k])
            cur = out[-1]
            if side == "L":
                nxt = zz * cur - b @ cur - g @ prev
            else:
                nxt = zz * cur - cur @ b - prev @ g
            prev = cur
            out.append(nxt)
        return out

    def eval_P_deriv(self, side: str, n: int, z, order: int = 1) -> np.ndarray:
        """Exact derivative of ``P_n`` from its coefficients."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape + (self.N, self.N), dtype=complex)
        if n < order:
            return out
        asc = prec.to_double(self.ascending(side, n))
        for j in range(n, order - 1, -1):
            f = 1.0
            for i in range(order):
                f *= j - i
            out = out * z[..., None, None] + f * asc[j]
        return out

    def to_double(self) -> "BiorthSystem":
        if self.precision == prec.DOUBLE:
            return self
        d = prec.to_double
        return BiorthSystem(self.N, self.n_max, [d(p) for p in self.PL], [d(p) for p in self.PR],
                            [d(c) for c in self.C], [d(c) for c in self.Cinv],
                            [d(b) for b in self.betaL], [d(b) for b in self.betaR],
                            [d(g) for g in self.gammaL], [d(g) for g in self.gammaR], prec.DOUBLE)


def _qr_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``a x = b`` with a column-pivoted QR factorization."""
    q, r, piv = sla.qr(a, pivoting=True)
    y = sla.solve_triangular(r, q.conj().T @ b)
    x = np.empty_like(y)
    x[piv] = y
    return x


def _solve(a, b, precision):
    if precision == prec.DD:
        with prec.dd_context():
            return prec.solve(a, b)
    return _qr_solve(a, b)


def _cond(h, precision) -> tuple:
    sv = prec.singular_values(h)
    smax, smin = float(np.max(sv)), float(np.min(sv))
    return smin / smax if smax > 0 else 0.0, (smax / smin if smin > 0 else np.inf)


def biorthogonalize(table: MomentTable, n_max: int | None = None, regularity: float | None = None,
                    max_cond: float | None = None) -> BiorthSystem:
    """Monic biorthogonal polynomials, ``C_n`` and recurrence coefficients.

    Parameters
    ----------
    table
        Moments up to ``W_{2 n_max + 1}``.
    n_max
        Highest degree for which ``C_n``, ``beta_n`` and ``gamma_n`` are
        produced; defaults to ``table.n_max``.
    regularity, max_cond
        Relative singular value floor of the block Hankel matrices and the
        condition bound of the per-degree solves; both default to values
        depending on the table precision.

    Raises
    ------
    HankelSingular
        At the first degree whose Hankel matrix falls below ``regularity``.
    IllConditioned
        When a per-degree solve exceeds ``max_cond``.
    """
    n_max = table.n_max if n_max is None else n_max
    if n_max > table.n_max:
        raise ValueError(f"moment table supports n_max <= {table.n_max}")
    p = table.precision
    regularity = DEFAULT_REGULARITY[p] if regularity is None else regularity
    max_cond = DEFAULT_MAX_COND[p] if max_cond is None else max_cond
    n = table.N
    W = table.moments
    eye = prec.eye(n, p)

    PL, PR = [eye[None].copy()], [eye[None].copy()]
    for deg in range(1, n_max + 2):
        h = block_hankel(table, deg - 1)
        ratio, cond = _cond(h, p)
        if ratio <= regularity:
            raise HankelSingular(deg - 1, ratio)
        if cond > max_cond:
            raise IllConditioned(cond, max_cond)
        # left: A H = -[W_deg .. W_{2deg-1}]  <=>  H^T A^T = -(...)^T
        row = np.concatenate([W[deg + k] for k in range(deg)], axis=1)
        col = np.concatenate([W[deg + k] for k in range(deg)], axis=0)
        with prec.context(p):
            a = _solve(h.T, -row.T, p).T  # (N, deg N)
            b = _solve(h, -col, p)  # (deg N, N)
        a_blocks = [a[:, j * n:(j + 1) * n] for j in range(deg)] + [eye]
        b_blocks = [b[j * n:(j + 1) * n, :] for j in range(deg)] + [eye]
        PL.append(np.array(a_blocks[::-1]))
        PR.append(np.array(b_blocks[::-1]))

    C, Cinv = [], []
    with prec.context(p):
        for deg in range(n_max + 1):
            asc = PL[deg][::-1]
            ci = sum((asc[j] @ W[j + deg] for j in range(deg + 1)), prec.zeros((n, n), p))
            Cinv.append(ci)
            C.append(prec.inv(ci))
        betaL, betaR, gammaL, gammaR = [], [], [], []
        for deg in range(n_max + 1):
            p1 = PL[deg][1] if deg > 0 else prec.zeros((n, n), p)
            r1 = PR[deg][1] if deg > 0 else prec.zeros((n, n), p)
            betaL.append(p1 - PL[deg + 1][1])
            betaR.append(r1 - PR[deg + 1][1])
            if deg == 0:
                gammaL.append(prec.zeros((n, n), p))
                gammaR.append(prec.zeros((n, n), p))
            else:
                gammaL.append(Cinv[deg] @ C[deg - 1])
                gammaR.append(C[deg - 1] @ Cinv[deg])
    return BiorthSystem(n, n_max, PL, PR, C, Cinv, betaL, betaR, gammaL, gammaR, p)


def bilinear(sys: BiorthSystem, table: MomentTable, n: int, m: int):
    """``<P_n^L, P_m^R>_W`` expanded over the moment table."""
    a, b = sys.ascending("L", n), sys.ascending("R", m)
    acc = prec.zeros((sys.N, sys.N), sys.precision)
    for j in range(n + 1):
        row = sum((table[j + k] @ b[k] for k in range(m + 1)), prec.zeros((sys.N, sys.N), sys.precision))
        acc = acc + a[j] @ row
    return acc


def verify_biorthogonality(sys: BiorthSystem, table: MomentTable, tol: float | None = None,
                           n_max: int | None = None) -> ResidualReport:
    """Frobenius residuals of ``<P_n^L, P_m^R> - delta_nm C_n^-1`` for all ``n, m``."""
    n_max = sys.n_max if n_max is None else n_max
    tol = (1e-9 if sys.precision == prec.DOUBLE else 1e-20) if tol is None else tol
    vals, labels = [], []
    with prec.context(sys.precision):
        for i in range(n_max + 1):
            for j in range(n_max + 1):
                r = bilinear(sys, table, i, j)
                if i == j:
                    r = r - sys.Cinv[i]
                vals.append(prec.norm(r))
                labels.append(f"{i},{j}")
    rep = ResidualReport()
    rep.add("biorthogonality", vals, tol, labels)
    return rep


def _shift_up(asc: np.ndarray) -> np.ndarray:
    z = np.zeros_like(asc[:1]) if asc.dtype != object else prec.zeros((1,) + asc.shape[1:], prec.DD)
    return np.concatenate([z, asc], axis=0)


def _pad(asc: np.ndarray, length: int, precision: str) -> np.ndarray:
    extra = length - asc.shape[0]
    if extra <= 0:
        return asc
    return np.concatenate([asc, prec.zeros((extra,) + asc.shape[1:], precision)], axis=0)


def three_term_residuals(sys: BiorthSystem, side: str = "L") -> list:
    """Coefficient residuals of the recurrence, one per degree ``0..n_max``."""
    out = []
    p = sys.precision
    with prec.context(p):
        for n in range(sys.n_max + 1):
            zp = _shift_up(sys.ascending(side, n))
            nxt = sys.ascending(side, n + 1)
            cur = _pad(sys.ascending(side, n), n + 2, p)
            prv = _pad(sys.ascending(side, n - 1), n + 2, p) if n > 0 else prec.zeros((n + 2, sys.N, sys.N), p)
            if side == "L":
                r = zp - nxt - np.array([sys.betaL[n] @ c for c in cur]) - np.array([sys.gammaL[n] @ c for c in prv])
            else:
                r = zp - nxt - np.array([c @ sys.betaR[n] for c in cur]) - np.array([c @ sys.gammaR[n] for c in prv])
            out.append(prec.norm(r))
    return out


def check_three_term(sys: BiorthSystem, table: MomentTable | None = None, tol: float = 1e-8) -> ResidualReport:
    """Recurrence residuals as exact polynomial-coefficient identities."""
    rep = ResidualReport()
    rep.add("three-term-left", three_term_residuals(sys, "L"), tol)
    rep.add("three-term-right", three_term_residuals(sys, "R"), tol)
    return rep


def p2_sum_as_printed(sys: BiorthSystem, n: int):
    """Double sum over all ``i, j < n`` minus ``sum_{k<n} gamma_k``."""
    b = sys.betaL
    acc = prec.zeros((sys.N, sys.N), sys.precision)
    for i in range(n):
        for j in range(n):
            acc = acc + b[i] @ b[j]
    for k in range(n):
        acc = acc - sys.gammaL[k]
    return acc


def p2_sum_ordered(sys: BiorthSystem, n: int):
    """``sum_{j<k<n} beta_k beta_j - sum_{k<n} gamma_k`` (telescoped recursion)."""
    b = sys.betaL
    acc = prec.zeros((sys.N, sys.N), sys.precision)
    for k in range(n):
        for j in range(k):
            acc = acc + b[k] @ b[j]
    for k in range(n):
        acc = acc - sys.gammaL[k]
    return acc


def check_sum_formulas(sys: BiorthSystem, tol: float = 1e-9) -> ResidualReport:
    """``p^1``/``p^2`` sum formulas, the defining ``p^2`` recursion and ``beta^R`` similarity."""
    rep = ResidualReport()
    p = sys.precision
    p1, rec, printed, ordered, sim = [], [], [], [], []
    with prec.context(p):
        for n in range(sys.n_max + 1):
            s = sum(sys.betaL[:n], prec.zeros((sys.N, sys.N), p))
            p1.append(prec.norm(sys.p("L", n, 1) + s))
            printed.append(prec.norm(sys.p("L", n, 2) - p2_sum_as_printed(sys, n)))
            ordered.append(prec.norm(sys.p("L", n, 2) - p2_sum_ordered(sys, n)))
            lhs = sys.p("L", n, 2) - sys.p("L", n + 1, 2)
            rec.append(prec.norm(lhs - sys.betaL[n] @ sys.p("L", n, 1) - sys.gammaL[n]))
            sim.append(prec.norm(sys.betaR[n] - sys.C[n] @ sys.betaL[n] @ sys.Cinv[n]))
    rep.add("p1-sum", p1, tol)
    rep.add("p2-recursion", rec, tol)
    rep.add("p2-sum-ordered", ordered, tol)
    rep.add("p2-sum-as-printed", printed, tol)
    rep.add("beta-similarity", sim, tol)
    return rep
