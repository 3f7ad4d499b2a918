"""Fundamental matrices, constant jumps, transfer and structure matrices.

Left objects (``Y``, ``Z``, ``T``, ``M`` for ``n >= 1``):

    Y_n^L = [[P_n^L, Q_n^L], [-C_{n-1} P_{n-1}^L, -C_{n-1} Q_{n-1}^L]],
    Y_n^R = [[P_n^R, -P_{n-1}^R C_{n-1}], [Q_n^R, -Q_{n-1}^R C_{n-1}]],
    Z_n^L = Y_n^L diag(W^L, (W^R)^-1),   Z_n^R = diag(W^R, (W^L)^-1) Y_n^R,
    M_n^L = (Z_n^L)' (Z_n^L)^-1,         M_n^R = (Z_n^R)^-1 (Z_n^R)'.

With moments taken as plain integrals over [0, 1], the jump of ``Q_n``
across the interval is ``2 pi i P_n W``, so the off-diagonal entries of
the constant jumps carry the same factor.  Closed forms of
``Mt_n = z(1-z) M_n`` are returned as ascending polynomial coefficient
arrays of shape ``(3, 2N, 2N)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import precision as prec
from .linalg import blocks, mat_exp, symplectic_j
from .pipeline import Pipeline
from .report import ResidualReport
from .secondkind import dist_to_cut, richardson
from .weights import poly_degree, poly_eval

TWO_PI_I = 2j * math.pi


class UnsupportedDegree(ValueError):
    pass


class DerivativeInconsistent(ArithmeticError):
    pass


@dataclass(frozen=True)
class FundamentalFrame:
    """Left and right fundamental data of one degree at one point."""

    n: int
    z: complex
    YL: np.ndarray
    YR: np.ndarray
    ZL: np.ndarray
    ZR: np.ndarray
    ML: np.ndarray | None
    MR: np.ndarray | None
    C0L: np.ndarray
    C0R: np.ndarray
    C1L: np.ndarray
    C1R: np.ndarray


# -- fundamental matrices -------------------------------------------------

def assemble_Y(pl: Pipeline, z: complex, n: int, side: str = "L", near_cut: bool = False) -> np.ndarray:
    """``Y_n^L`` or ``Y_n^R`` at ``z`` (``n >= 1``)."""
    if n < 1:
        raise ValueError("Y_n needs n >= 1")
    s = pl.sysd
    ev = pl.ev
    c = s.C[n - 1]
    if side == "L":
        return np.block([[s.eval_P("L", n, z), ev.Q("L", n, z, near_cut=near_cut)],
                         [-c @ s.eval_P("L", n - 1, z), -c @ ev.Q("L", n - 1, z, near_cut=near_cut)]])
    return np.block([[s.eval_P("R", n, z), -s.eval_P("R", n - 1, z) @ c],
                     [ev.Q("R", n, z, near_cut=near_cut), -ev.Q("R", n - 1, z, near_cut=near_cut) @ c]])


def assemble_Y_deriv(pl: Pipeline, z: complex, n: int, order: int = 1, side: str = "L") -> np.ndarray:
    """Derivative of ``Y_n`` from exact polynomial derivatives and Cauchy kernel derivatives."""
    s = pl.sysd
    ev = pl.ev
    c = s.C[n - 1]
    dP = lambda sd, k: s.eval_P_deriv(sd, k, z, order)
    dQ = lambda sd, k: ev.Q(sd, k, z, deriv=order)
    if side == "L":
        return np.block([[dP("L", n), dQ("L", n)], [-c @ dP("L", n - 1), -c @ dQ("L", n - 1)]])
    return np.block([[dP("R", n), -dP("R", n - 1) @ c], [dQ("R", n), -dQ("R", n - 1) @ c]])


def _weight_factors(pl: Pipeline, z: complex):
    w = pl.w
    return w.eval_WL(z), w.eval_WR(z)


def assemble_Z(pl: Pipeline, z: complex, n: int, side: str = "L", near_cut: bool = False) -> np.ndarray:
    """Constant-jump fundamental matrix; ``z`` must lie off ``[0, +inf)``."""
    if complex(z).imag == 0 and complex(z).real >= 0:
        raise ValueError("Z_n is evaluated off the cut [0, +inf)")
    wl, wr = _weight_factors(pl, z)
    y = assemble_Y(pl, z, n, side, near_cut)
    zero = np.zeros_like(wl)
    if side == "L":
        return y @ np.block([[wl, zero], [zero, np.linalg.inv(wr)]])
    return np.block([[wr, zero], [zero, np.linalg.inv(wl)]]) @ y


def y_inverse_residual(pl: Pipeline, z: complex, n: int) -> float:
    """``|| Y^L [[0,I],[-I,0]] Y^R [[0,-I],[I,0]] - I || / (||Y^L|| ||Y^R||)``.

    The product cancels terms of size ``||Y^L|| ||Y^R||`` (which grows like
    ``|z|^(2n) ||C_n||``), so the defect is measured relative to it.
    """
    yl = assemble_Y(pl, z, n, "L")
    yr = assemble_Y(pl, z, n, "R")
    j = symplectic_j(pl.N)
    prod = yl @ (-j) @ yr @ j
    return float(np.linalg.norm(prod - np.eye(2 * pl.N)) / (np.linalg.norm(yl) * np.linalg.norm(yr)))


def y_asymptotic_residual(pl: Pipeline, z: complex, n: int) -> float:
    """``|| Y_n^L(z) diag(z^-n I, z^n I) - I ||``."""
    y = assemble_Y(pl, z, n, "L")
    N = pl.N
    d = np.diag(np.concatenate([np.full(N, z ** -n), np.full(N, z ** n)]))
    return float(np.linalg.norm(y @ d - np.eye(2 * N)))


# -- jumps -------------------------------------------------------------------

def jump_constants(w) -> tuple:
    """``(C0L, C0R, C1L, C1R)`` for the factored weight ``w``.

    ``C0L = C1L = W0L^-1 exp(-2 pi i alpha) W0L`` (cut of ``z**alpha`` on
    ``(0, inf)``), ``C1R = W0R exp(2 pi i beta) W0R^-1`` (cut of
    ``(1-z)**beta`` on ``(1, inf)``) and ``C0R = I`` since ``W^R`` is
    analytic across (0, 1).
    """
    n = w.N
    c0l = np.linalg.solve(w.W0L, mat_exp(-TWO_PI_I * w.alpha) @ w.W0L)
    c1r = w.W0R @ mat_exp(TWO_PI_I * w.beta) @ np.linalg.inv(w.W0R)
    return c0l, np.eye(n, dtype=complex), c0l.copy(), c1r


def jump_matrix(w, interval: str, side: str = "L") -> np.ndarray:
    """``G`` with ``Z_+ = Z_- G`` (left) or ``Z_+ = G Z_-`` (right).

    ``interval`` is ``"01"`` or ``"1inf"``.
    """
    c0l, _, c1l, c1r = jump_constants(w)
    n = w.N
    eye = np.eye(n, dtype=complex)
    zero = np.zeros((n, n), dtype=complex)
    if interval == "01":
        if side == "L":
            return np.block([[c0l, TWO_PI_I * c0l], [zero, eye]])
        return np.block([[eye, zero], [TWO_PI_I * eye, np.linalg.inv(c0l)]])
    if interval == "1inf":
        if side == "L":
            return np.block([[c1l, zero], [zero, c1r]])
        return np.block([[np.linalg.inv(c1r), zero], [zero, np.linalg.inv(c1l)]])
    raise ValueError(f"unknown interval {interval!r}")


def z_jump_defect(pl: Pipeline, t: float, eps: float, n: int, side: str = "L") -> np.ndarray:
    """``Z_+ - Z_- G`` (or ``Z_+ - G Z_-``) at ``t +- i eps``, relative to ``|Z_+|``."""
    interval = "01" if 0 < t < 1 else "1inf"
    g = jump_matrix(pl.w, interval, side)
    zp = assemble_Z(pl, complex(t, eps), n, side, near_cut=True)
    zm = assemble_Z(pl, complex(t, -eps), n, side, near_cut=True)
    d = zp - (zm @ g if side == "L" else g @ zm)
    return d / np.linalg.norm(zp)


def verify_Z_jump(pl: Pipeline, points, n: int, eps0: float = 1e-2, levels: int = 4,
                  tol: float = 1e-5, side: str = "L") -> ResidualReport:
    """Richardson-extrapolated jump defects at ``t +- i eps0 2^-k``, ``k < levels``.

    Points in (0, 1) go to ``z-jump-01``, points beyond 1 to ``z-jump-1inf``.
    Each detail also lists the raw defects at ``eps0`` and ``eps0 / 10``.
    """
    rep = ResidualReport()
    inner, outer = [], []
    for t in points:
        defects = [z_jump_defect(pl, t, eps0 * 2.0**-k, n, side) for k in range(levels)]
        ex = float(np.linalg.norm(richardson(defects)))
        raw = [float(np.linalg.norm(defects[0])), float(np.linalg.norm(z_jump_defect(pl, t, eps0 / 10, n, side)))]
        (inner if t < 1 else outer).append((t, ex, raw))
    if inner:
        e = rep.add("z-jump-01", [x[1] for x in inner], tol, [f"t={x[0]}" for x in inner])
        e.detail += [(f"raw t={x[0]} eps={eps0},{eps0 / 10}", x[2]) for x in inner]
    if outer:
        e = rep.add("z-jump-1inf", [x[1] for x in outer], tol, [f"t={x[0]}" for x in outer])
        e.detail += [(f"raw t={x[0]} eps={eps0},{eps0 / 10}", x[2]) for x in outer]
    return rep


def verify_plemelj(pl: Pipeline, t: float, n: int, d0: float = 0.05, levels: int = 5, side: str = "L") -> float:
    """Relative error of the extrapolated ``Q_+ - Q_-`` against ``2 pi i P_n W``."""
    ev, s = pl.ev, pl.sysd
    diffs = [ev.Q(side, n, complex(t, d0 * 2.0**-k), near_cut=True)
             - ev.Q(side, n, complex(t, -d0 * 2.0**-k), near_cut=True) for k in range(levels)]
    p = s.eval_P(side, n, t)
    wt = pl.w.eval_W(t)
    ref = TWO_PI_I * (p @ wt if side == "L" else wt @ p)
    return float(np.linalg.norm(richardson(diffs) - ref) / np.linalg.norm(ref))


# -- transfer matrices ---------------------------------------------------------

def transfer_matrix(sys, n: int, z: complex, side: str = "L") -> np.ndarray:
    s = sys.to_double()
    eye = np.eye(s.N, dtype=complex)
    zero = np.zeros_like(eye)
    if side == "L":
        return np.block([[z * eye - s.betaL[n], s.Cinv[n]], [-s.C[n], zero]])
    return np.block([[z * eye - s.betaR[n], -s.C[n]], [s.Cinv[n], zero]])


def transfer_poly(sys, n: int, side: str = "L") -> np.ndarray:
    """``T_n`` as ascending coefficients ``(2, 2N, 2N)`` in the system precision."""
    p = sys.precision
    N = sys.N
    eye, zero = prec.eye(N, p), prec.zeros((N, N), p)
    if side == "L":
        t0 = np.block([[-sys.betaL[n], sys.Cinv[n]], [-sys.C[n], zero]])
    else:
        t0 = np.block([[-sys.betaR[n], -sys.C[n]], [sys.Cinv[n], zero]])
    t1 = np.block([[eye, zero], [zero, zero]])
    return np.array([t0, t1])


def verify_transfer(pl: Pipeline, points, n_values, tol: float = 1e-8) -> ResidualReport:
    """``Y_{n+1}^L - T_n^L Y_n^L`` and ``Y_{n+1}^R - Y_n^R T_n^R`` relative residuals."""
    vals, labels, dets = [], [], []
    for n in n_values:
        for z in points:
            for side in ("L", "R"):
                y0 = assemble_Y(pl, z, n, side)
                y1 = assemble_Y(pl, z, n + 1, side)
                t = transfer_matrix(pl.sys, n, z, side)
                r = y1 - (t @ y0 if side == "L" else y0 @ t)
                vals.append(_colblock_relative(r, y1, pl.N) if side == "L" else _rowblock_relative(r, y1, pl.N))
                labels.append(f"{side} n={n} z={z}")
        d = [np.linalg.det(transfer_matrix(pl.sys, n, z)) for z in points]
        dets.append(max(abs(x - d[0]) for x in d) / abs(d[0]))
    rep = ResidualReport()
    rep.add("transfer", vals, tol, labels)
    rep.add("transfer-det", dets, 1e-10, [f"n={n}" for n in n_values])
    return rep


def _colblock_relative(r, ref, n) -> float:
    """Largest residual over the two column blocks, each relative to its reference."""
    out = 0.0
    for sl in (slice(0, n), slice(n, 2 * n)):
        out = max(out, np.linalg.norm(r[:, sl]) / max(np.linalg.norm(ref[:, sl]), 1e-300))
    return float(out)


def _rowblock_relative(r, ref, n) -> float:
    out = 0.0
    for sl in (slice(0, n), slice(n, 2 * n)):
        out = max(out, np.linalg.norm(r[sl]) / max(np.linalg.norm(ref[sl]), 1e-300))
    return float(out)


# -- structure matrices ----------------------------------------------------------

def _fd(f, z: complex, h: complex):
    return (-f(z + 2 * h) + 8 * f(z + h) - 8 * f(z - h) + f(z - 2 * h)) / (12 * h)


def structure_matrix_numeric(pl: Pipeline, z: complex, n: int, side: str = "L", h: float | None = None,
                             agree: float = 1e-7, near_cut: bool = False) -> np.ndarray:
    """``Mt_n = z(1-z) M_n`` from fourth-order differences of ``Z_n``.

    The derivative is taken along the real and the imaginary direction; the
    two estimates must agree to ``agree`` (relative), which certifies local
    holomorphy and the absence of cut crossings.
    """
    z = complex(z)
    if h is None:
        h = min(1e-3, 0.1 * dist_to_cut(z), 0.1 * abs(z.imag) if z.real >= 0 else 1e-3)
    f = lambda x: assemble_Z(pl, x, n, side, near_cut=near_cut)
    d1 = _fd(f, z, h)
    d2 = _fd(f, z, 1j * h)
    scale = max(np.linalg.norm(d1), 1e-300)
    if np.linalg.norm(d1 - d2) / scale > agree:
        raise DerivativeInconsistent(
            f"directional derivatives differ by {np.linalg.norm(d1 - d2) / scale:.2e} at z={z}")
    dz = 0.5 * (d1 + d2)
    zz = f(z)
    m = dz @ np.linalg.inv(zz) if side == "L" else np.linalg.solve(zz, dz)
    return z * (1 - z) * m


def _pad_h(c, deg, p):
    c = prec.convert(c, p)
    if c.shape[0] > deg + 1:
        raise UnsupportedDegree(f"Pearson coefficient of degree {c.shape[0] - 1} > {deg}")
    if c.shape[0] < deg + 1:
        c = np.concatenate([c, prec.zeros((deg + 1 - c.shape[0],) + c.shape[1:], p)])
    return c


def structure_closed_form(pl: Pipeline, n: int, degree: int | None = None, side: str = "L") -> np.ndarray:
    """Ascending coefficients ``(3, 2N, 2N)`` of ``Mt_n`` from recurrence data.

    ``degree`` 1 uses the linear-``h`` formula (``h = A z + B``); degree 2
    the entrywise quadratic formula with ``h_0 + h_1 z + h_2 z^2``, using
    ``p^1, p^2`` from the polynomial coefficients and ``q^1, q^2`` from the
    moment expansion.  The right matrix is ``-J Mt^L J^-1``.

    Raises
    ------
    UnsupportedDegree
        If ``h^L`` or ``h^R`` has degree above two.
    """
    w = pl.w
    deg = max(poly_degree(w.hL), poly_degree(w.hR))
    if deg > 2:
        raise UnsupportedDegree(f"closed forms exist for degree <= 2, weight has {deg}")
    degree = max(deg, 1) if degree is None else degree
    if degree < deg:
        raise UnsupportedDegree(f"degree {degree} requested for a degree {deg} weight")
    mt = _closed_left_linear(pl, n) if degree == 1 else _closed_left_quadratic(pl, n)
    if side == "L":
        return mt
    j = prec.convert(symplectic_j(pl.N), pl.precision)
    jinv = -j
    return np.array([-(j @ c @ jinv) for c in mt])


def _q(pl, side, n, k):
    from .secondkind import q_expansion
    return q_expansion(pl.sys, pl.table, n, k, side)[k]


def _closed_left_linear(pl: Pipeline, n: int) -> np.ndarray:
    p = pl.precision
    s = pl.sys
    N = pl.N
    hl = _pad_h(pl.w.hL, 1, p)
    hr = _pad_h(pl.w.hR, 1, p)
    BL, AL = hl[0], hl[1]
    BR, AR = hr[0], hr[1]
    I = prec.eye(N, p)
    Z = prec.zeros((N, N), p)
    with prec.context(p):
        p1l, p1r = s.p("L", n, 1), s.p("R", n, 1)
        ci, cm = s.Cinv[n], s.C[n - 1]
        m0 = np.block([[p1l @ AL - AL @ p1l + p1l + n * I + BL, AL @ ci + ci @ AR - (2 * n + 1) * ci],
                       [-cm @ AL - AR @ cm + (2 * n - 1) * cm, p1r @ AR - AR @ p1r - p1r - n * I - BR]])
        m1 = np.block([[AL - n * I, Z], [Z, n * I - AR]])
        m2 = np.block([[Z, Z], [Z, Z]])
    return np.array([m0, m1, m2])


def _closed_left_quadratic(pl: Pipeline, n: int) -> np.ndarray:
    p = pl.precision
    s = pl.sys
    N = pl.N
    h0L, h1L, h2L = _pad_h(pl.w.hL, 2, p)
    h0R, h1R, h2R = _pad_h(pl.w.hR, 2, p)
    I = prec.eye(N, p)
    Z = prec.zeros((N, N), p)
    with prec.context(p):
        p1L, p2L = s.p("L", n, 1), s.p("L", n, 2)
        p1Lm = s.p("L", n - 1, 1)
        p1R, p2R = s.p("R", n, 1), s.p("R", n, 2)
        p1Rm = s.p("R", n - 1, 1)
        q1Rm, q2Rm = _q(pl, "R", n - 1, 1), _q(pl, "R", n - 1, 2)
        q1R = _q(pl, "R", n, 1)
        q1Lm, q2Lm = _q(pl, "L", n - 1, 1), _q(pl, "L", n - 1, 2)
        q1L = _q(pl, "L", n, 1)
        ci, cm = s.Cinv[n], s.C[n - 1]

        a0 = (ci @ h2R @ cm + h0L + h1L @ q1Rm + p1L @ h1L + h2L @ q2Rm + p2L @ h2L
              + p1L @ h2L @ q1Rm + n * I + p1L)
        a1 = h1L + h2L @ q1Rm + p1L @ h2L - n * I
        a2 = h2L

        b0 = (h1L + h2L @ q1R + p1L @ h2L) @ ci + ci @ (h1R + h2R @ p1R + q1L @ h2R) - (2 * n + 1) * ci
        b1 = h2L @ ci + ci @ h2R

        c0 = (-cm @ (h1L + h2L @ q1Rm + p1Lm @ h2L) - (h1R + h2R @ p1Rm + q1Lm @ h2R) @ cm
              + (2 * n - 1) * cm)
        c1 = -cm @ h2L - h2R @ cm

        d0 = (-cm @ h2L @ ci - h0R - h1R @ p1R - q1Lm @ h1R - h2R @ p2R - q2Lm @ h2R
              - q1Lm @ h2R @ p1R - n * I - p1R)
        d1 = -h1R - h2R @ p1R - q1Lm @ h2R + n * I
        d2 = -h2R

        m0 = np.block([[a0, b0], [c0, d0]])
        m1 = np.block([[a1, b1], [c1, d1]])
        m2 = np.block([[a2, Z], [Z, d2]])
    return np.array([m0, m1, m2])


def eval_poly_matrix(coeffs: np.ndarray, z):
    return poly_eval(prec.to_double(coeffs), z)


def closed_vs_numeric(pl: Pipeline, points, n_values, tol: float = 1e-6, degree: int | None = None) -> ResidualReport:
    """Relative difference of closed-form and finite-difference ``Mt_n^L``."""
    vals, labels = [], []
    for n in n_values:
        cf = structure_closed_form(pl, n, degree)
        for z in points:
            num = structure_matrix_numeric(pl, z, n)
            ref = eval_poly_matrix(cf, z)
            vals.append(np.linalg.norm(num - ref) / np.linalg.norm(ref))
            labels.append(f"n={n} z={z}")
    rep = ResidualReport()
    rep.add("m-closed-form", vals, tol, labels)
    return rep


def m_left_right_residual(pl: Pipeline, z: complex, n: int) -> float:
    ml = structure_matrix_numeric(pl, z, n, "L")
    mr = structure_matrix_numeric(pl, z, n, "R")
    j = symplectic_j(pl.N)
    return float(np.linalg.norm(mr + j @ ml @ np.linalg.inv(j)) / np.linalg.norm(ml))


def _polymul(a: np.ndarray, b: np.ndarray, p: str) -> np.ndarray:
    out = prec.zeros((a.shape[0] + b.shape[0] - 1,) + a.shape[1:], p)
    for i in range(a.shape[0]):
        for j in range(b.shape[0]):
            out[i + j] = out[i + j] + a[i] @ b[j]
    return out


def zero_curvature_coefficients(pl: Pipeline, n: int, side: str = "L", degree: int | None = None) -> float:
    """Coefficient residual of the zero curvature identity for ``Mt``.

    Left: ``Mt_{n+1} T_n - T_n Mt_n = z(1-z) diag(I, 0)``; right:
    ``T_n Mt_{n+1}^R - Mt_n^R T_n = z(1-z) diag(I, 0)``.  Evaluated in the
    working precision of the pipeline, relative to the largest coefficient.
    """
    p = pl.precision
    N = pl.N
    with prec.context(p):
        m0 = structure_closed_form(pl, n, degree, side)
        m1 = structure_closed_form(pl, n + 1, degree, side)
        t = transfer_poly(pl.sys, n, side)
        if side == "L":
            lhs = _polymul(m1, t, p) - _polymul(t, m0, p)
        else:
            lhs = _polymul(t, m1, p) - _polymul(m0, t, p)
        e = prec.zeros((2 * N, 2 * N), p)
        e[:N, :N] = prec.eye(N, p)
        lhs[1] = lhs[1] - e
        lhs[2] = lhs[2] + e
        scale = max(prec.norm(c) for c in m1)
        return prec.norm(lhs) / scale


def zero_curvature_numeric(pl: Pipeline, z: complex, n: int) -> float:
    """Zero curvature with numeric ``M`` at both indices (left)."""
    m0 = structure_matrix_numeric(pl, z, n) / (z * (1 - z))
    m1 = structure_matrix_numeric(pl, z, n + 1) / (z * (1 - z))
    t = transfer_matrix(pl.sys, n, z)
    N = pl.N
    e = np.zeros((2 * N, 2 * N), dtype=complex)
    e[:N, :N] = np.eye(N)
    return float(np.linalg.norm(m1 @ t - t @ m0 - e) / max(np.linalg.norm(m1 @ t), 1.0))


def entire_ratio(pl: Pipeline, n: int, center: complex = 0.0, radius: float = 0.02, count: int = 12) -> tuple:
    """``(max/min ||Mt||, values)`` on a small circle avoiding the positive axis."""
    ang = np.linspace(np.pi / 6, 2 * np.pi - np.pi / 6, count)
    vals = []
    for a in ang:
        z = center + radius * np.exp(1j * a)
        m = structure_matrix_numeric(pl, z, n, h=radius * 0.05, agree=1e-4, near_cut=True)
        vals.append(float(np.linalg.norm(m)))
    return max(vals) / min(vals), vals


def frame(pl: Pipeline, z: complex, n: int, with_m: bool = True) -> FundamentalFrame:
    c0l, c0r, c1l, c1r = jump_constants(pl.w)
    ml = structure_matrix_numeric(pl, z, n, "L") / (z * (1 - z)) if with_m else None
    mr = structure_matrix_numeric(pl, z, n, "R") / (z * (1 - z)) if with_m else None
    return FundamentalFrame(n, complex(z), assemble_Y(pl, z, n, "L"), assemble_Y(pl, z, n, "R"),
                            assemble_Z(pl, z, n, "L"), assemble_Z(pl, z, n, "R"), ml, mr, c0l, c0r, c1l, c1r)


def trace_polynomial_fit(pl: Pipeline, n: int, points=None) -> float:
    """Residual of a degree-2 least-squares fit of ``tr Mt_n^L`` over seven points."""
    if points is None:
        points = [-1.0, -0.5 + 0.5j, 0.5 + 0.6j, 1.5 + 0.5j, 2 - 1j, -0.3 - 0.8j, 0.5 - 0.7j]
    ms = [structure_matrix_numeric(pl, z, n) for z in points]
    vals = np.array([np.trace(m) for m in ms])
    v = np.vander(np.array(points, dtype=complex), 3, increasing=True)
    coef, *_ = np.linalg.lstsq(v, vals, rcond=None)
    # relative to the size of Mt itself: the trace may vanish identically
    return float(np.linalg.norm(v @ coef - vals) / max(np.linalg.norm(m) for m in ms))
