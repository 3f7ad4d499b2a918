"""First and second order differential relations of the fundamental matrices.

With ``Mt_n = z(1-z) M_n`` and the map ``N(F) = F' + F^2 / (z(1-z))``:

    z(1-z) Y' + Y diag(h^L, -h^R) = Mt Y                         (left)
    z(1-z) Y'' + Y' diag(2h^L + (1-2z), -2h^R + (1-2z))
              + Y diag(N(h^L), N(-h^R)) = N(Mt) Y                 (left)

and the mirrored right versions.  ``P`` blocks are differentiated exactly
from their coefficients, ``Q`` blocks through derivatives of the Cauchy
kernel, and ``Mt`` comes from its closed form whenever ``h`` has degree at
most two.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import precision as prec
from .pipeline import Pipeline
from .report import ResidualReport
from .rh import (assemble_Y, assemble_Y_deriv, eval_poly_matrix, structure_closed_form,
                 structure_matrix_numeric)
from .weights import poly_deriv, poly_eval


class DegenerateParameters(ValueError):
    pass


def n_map(F: np.ndarray, dF: np.ndarray, z: complex) -> np.ndarray:
    """``N(F) = F' + F^2 / (z(1-z))``; ``F^2`` is formed before the division."""
    sq = F @ F
    return dF + sq / (z * (1 - z))


@dataclass(frozen=True)
class NMapResult:
    """Samples of ``F``, ``F'`` and ``N(F)``; 2x2 block views for ``2N x 2N`` input."""

    z: tuple
    F: np.ndarray
    dF: np.ndarray
    N: np.ndarray

    def H(self, i: int, j: int) -> np.ndarray:
        """Block ``(i, j)`` (1-based) of every ``N(F)`` sample."""
        n = self.N.shape[-1] // 2
        return self.N[..., (i - 1) * n:i * n, (j - 1) * n:j * n]


def n_map_poly(coeffs: np.ndarray, points) -> NMapResult:
    """``N`` of a matrix polynomial at several points, with exact derivative."""
    c = prec.to_double(coeffs)
    pts = tuple(complex(z) for z in points)
    F = np.array([poly_eval(c, z) for z in pts])
    dF = np.array([poly_eval(poly_deriv(c), z) for z in pts])
    Nv = np.array([n_map(f, d, z) for f, d, z in zip(F, dF, pts)])
    return NMapResult(pts, F, dF, Nv)


def mt_and_derivative(pl: Pipeline, n: int, z: complex, side: str = "L"):
    """``(Mt, Mt')`` at ``z``: closed form when available, else differences."""
    try:
        cf = prec.to_double(structure_closed_form(pl, n, side=side))
    except ValueError:
        cf = None
    if cf is not None:
        return poly_eval(cf, z), poly_eval(poly_deriv(cf), z)
    h = 1e-3
    f = lambda x: structure_matrix_numeric(pl, x, n, side)
    d = (-f(z + 2 * h) + 8 * f(z + h) - 8 * f(z - h) + f(z - 2 * h)) / (12 * h)
    return f(z), d


def _h_values(pl: Pipeline, z: complex):
    """``h^L, h^R``, their derivatives and ``N(h^L), N(-h^R)``, ``N(h^R), N(-h^L)`` at ``z``."""
    hl, hr = pl.w.hL, pl.w.hR
    HL, HR = poly_eval(hl, z), poly_eval(hr, z)
    dHL, dHR = poly_eval(poly_deriv(hl), z), poly_eval(poly_deriv(hr), z)
    return {
        "hL": HL, "hR": HR,
        "N(hL)": n_map(HL, dHL, z), "N(-hL)": n_map(-HL, -dHL, z),
        "N(hR)": n_map(HR, dHR, z), "N(-hR)": n_map(-HR, -dHR, z),
    }


def _blockdiag(a, b):
    z = np.zeros_like(a)
    return np.block([[a, z], [z, b]])


def _block_relative(residual, terms, n: int, axis: str) -> float:
    """Largest relative residual over column (``axis='col'``) or row blocks."""
    out = 0.0
    for k in range(2):
        sl = slice(k * n, (k + 1) * n)
        pick = (lambda m: m[:, sl]) if axis == "col" else (lambda m: m[sl])
        scale = max(np.linalg.norm(pick(t)) for t in terms)
        out = max(out, np.linalg.norm(pick(residual)) / max(scale, 1e-300))
    return float(out)


def first_order_values(pl: Pipeline, n: int, z: complex) -> dict:
    """Relative residuals of the left and right first order equations at ``z``."""
    N = pl.N
    hv = _h_values(pl, z)
    out = {}
    yl = assemble_Y(pl, z, n, "L")
    dyl = assemble_Y_deriv(pl, z, n, 1, "L")
    ml, _ = mt_and_derivative(pl, n, z, "L")
    t1 = z * (1 - z) * dyl
    t2 = yl @ _blockdiag(hv["hL"], -hv["hR"])
    t3 = ml @ yl
    out["L"] = _block_relative(t1 + t2 - t3, (t1, t2, t3), N, "col")
    yr = assemble_Y(pl, z, n, "R")
    dyr = assemble_Y_deriv(pl, z, n, 1, "R")
    mr, _ = mt_and_derivative(pl, n, z, "R")
    t1 = z * (1 - z) * dyr
    t2 = _blockdiag(hv["hR"], -hv["hL"]) @ yr
    t3 = yr @ mr
    out["R"] = _block_relative(t1 + t2 - t3, (t1, t2, t3), N, "row")
    return out


def second_order_values(pl: Pipeline, n: int, z: complex) -> dict:
    """Relative residuals of the left and right second order equations at ``z``."""
    N = pl.N
    I = np.eye(N, dtype=complex)
    hv = _h_values(pl, z)
    out = {}
    for side in ("L", "R"):
        y = assemble_Y(pl, z, n, side)
        dy = assemble_Y_deriv(pl, z, n, 1, side)
        d2y = assemble_Y_deriv(pl, z, n, 2, side)
        m, dm = mt_and_derivative(pl, n, z, side)
        nm = n_map(m, dm, z)
        t1 = z * (1 - z) * d2y
        if side == "L":
            t2 = dy @ _blockdiag(2 * hv["hL"] + (1 - 2 * z) * I, -2 * hv["hR"] + (1 - 2 * z) * I)
            t3 = y @ _blockdiag(hv["N(hL)"], hv["N(-hR)"])
            t4 = nm @ y
            out[side] = _block_relative(t1 + t2 + t3 - t4, (t1, t2, t3, t4), N, "col")
        else:
            t2 = _blockdiag(2 * hv["hR"] + (1 - 2 * z) * I, -2 * hv["hL"] + (1 - 2 * z) * I) @ dy
            t3 = _blockdiag(hv["N(hR)"], hv["N(-hL)"]) @ y
            t4 = y @ nm
            out[side] = _block_relative(t1 + t2 + t3 - t4, (t1, t2, t3, t4), N, "row")
    return out


def first_order_residual(pl: Pipeline, n: int, points, tol: float = 1e-7) -> ResidualReport:
    vals, labels = [], []
    for z in points:
        r = first_order_values(pl, n, z)
        for side in ("L", "R"):
            vals.append(r[side])
            labels.append(f"{side} n={n} z={z}")
    rep = ResidualReport()
    rep.add("first-order-ode", vals, tol, labels)
    return rep


def second_order_residual(pl: Pipeline, n: int, points, tol: float = 1e-6) -> ResidualReport:
    vals, labels = [], []
    for z in points:
        r = second_order_values(pl, n, z)
        for side in ("L", "R"):
            vals.append(r[side])
            labels.append(f"{side} n={n} z={z}")
    rep = ResidualReport()
    rep.add("second-order-ode", vals, tol, labels)
    return rep


def _rel(res, *terms, floor: float = 0.0) -> float:
    scale = max(max(np.linalg.norm(t) for t in terms), floor)
    return float(np.linalg.norm(res) / max(scale, 1e-300))


def _abs_poly(sys, side: str, n: int, t: complex, order: int) -> float:
    """``sum_j |d^order/dt^order of the j-th term|`` of ``P_n`` at ``t``.

    Used as a scale near zeros of ``P_n``, where the terms of a relation
    all vanish and their own sizes say nothing about rounding.
    """
    if n < order:
        return 0.0
    asc = prec.to_double(sys.ascending(side, n))
    r = abs(t)
    acc = 0.0
    for j in range(order, n + 1):
        f = 1.0
        for i in range(order):
            f *= j - i
        acc += f * np.linalg.norm(asc[j]) * r ** (j - order)
    return acc


def split_values(pl: Pipeline, n: int, z: complex, rows=("PL", "QL", "PR", "QR")) -> dict:
    """Residuals of the four split relations at one point.

    ``P`` rows may be evaluated on (0, 1); ``Q`` rows need an off-cut point.
    """
    s = pl.sysd
    N = pl.N
    I = np.eye(N, dtype=complex)
    hv = _h_values(pl, z)
    out = {}
    cm = s.C[n - 1]
    zz = z * (1 - z)
    if {"PL", "QL"} & set(rows):
        m, dm = mt_and_derivative(pl, n, z, "L")
        H = n_map(m, dm, z)
        H11, H12 = H[:N, :N], H[:N, N:]
    if {"PR", "QR"} & set(rows):
        m, dm = mt_and_derivative(pl, n, z, "R")
        G = n_map(m, dm, z)
        G11, G21 = G[:N, :N], G[N:, :N]
    if "PL" in rows:
        p, dp, d2p = (s.eval_P_deriv("L", n, z, k) if k else s.eval_P("L", n, z) for k in range(3))
        t = (zz * d2p, dp @ (2 * hv["hL"] + (1 - 2 * z) * I), p @ hv["N(hL)"],
             H11 @ p, H12 @ cm @ s.eval_P("L", n - 1, z))
        a = [_abs_poly(s, "L", n, z, k) for k in range(3)] + [_abs_poly(s, "L", n - 1, z, 0)]
        floor = (abs(zz) * a[2] + np.linalg.norm(2 * hv["hL"] + (1 - 2 * z) * I) * a[1]
                 + (np.linalg.norm(hv["N(hL)"]) + np.linalg.norm(H11)) * a[0]
                 + np.linalg.norm(H12 @ cm) * a[3])
        out["PL"] = _rel(t[0] + t[1] + t[2] - t[3] + t[4], *t, floor=floor)
    if "PR" in rows:
        p, dp, d2p = (s.eval_P_deriv("R", n, z, k) if k else s.eval_P("R", n, z) for k in range(3))
        t = (zz * d2p, (2 * hv["hR"] + (1 - 2 * z) * I) @ dp, hv["N(hR)"] @ p,
             p @ G11, s.eval_P("R", n - 1, z) @ cm @ G21)
        a = [_abs_poly(s, "R", n, z, k) for k in range(3)] + [_abs_poly(s, "R", n - 1, z, 0)]
        floor = (abs(zz) * a[2] + np.linalg.norm(2 * hv["hR"] + (1 - 2 * z) * I) * a[1]
                 + (np.linalg.norm(hv["N(hR)"]) + np.linalg.norm(G11)) * a[0]
                 + np.linalg.norm(cm @ G21) * a[3])
        out["PR"] = _rel(t[0] + t[1] + t[2] - t[3] + t[4], *t, floor=floor)
    if "QL" in rows:
        ev = pl.ev
        q, dq, d2q = (ev.Q("L", n, z, deriv=k) for k in range(3))
        t = (zz * d2q, -dq @ (2 * hv["hR"] - (1 - 2 * z) * I), q @ hv["N(-hR)"],
             H11 @ q, H12 @ cm @ ev.Q("L", n - 1, z))
        out["QL"] = _rel(t[0] + t[1] + t[2] - t[3] + t[4], *t)
    if "QR" in rows:
        ev = pl.ev
        q, dq, d2q = (ev.Q("R", n, z, deriv=k) for k in range(3))
        t = (zz * d2q, -(2 * hv["hL"] - (1 - 2 * z) * I) @ dq, hv["N(-hL)"] @ q,
             q @ G11, ev.Q("R", n - 1, z) @ cm @ G21)
        out["QR"] = _rel(t[0] + t[1] + t[2] - t[3] + t[4], *t)
    return out


def split_relation_residual(pl: Pipeline, n: int, t_grid, q_points, tol: float = 1e-8) -> ResidualReport:
    """``P`` rows on the real grid ``t_grid``, ``Q`` rows at the off-cut ``q_points``."""
    vals, labels = [], []
    for t in t_grid:
        for k, v in split_values(pl, n, t, ("PL", "PR")).items():
            vals.append(v)
            labels.append(f"{k} n={n} t={t}")
    for z in q_points:
        for k, v in split_values(pl, n, z, ("QL", "QR")).items():
            vals.append(v)
            labels.append(f"{k} n={n} z={z}")
    rep = ResidualReport()
    rep.add("split-relations", vals, tol, labels)
    return rep


# -- scalar Jacobi reduction ------------------------------------------------------

def scalar_jacobi_ode_coefficients(asc, alpha, beta, n: int):
    """Coefficients of ``z(1-z)P'' + (1+a-(a+b+2)z)P' + n(a+b+n+1)P`` and a matching scale.

    ``asc`` are the ascending scalar coefficients of ``P_n`` (floats or mpmath numbers).
    """
    lam = n * (alpha + beta + n + 1)
    res, scale = [], []
    for k in range(n + 1):
        ak = asc[k]
        ak1 = asc[k + 1] if k + 1 <= n else 0 * ak
        terms = [(k + 1) * k * ak1, -k * (k - 1) * ak, (1 + alpha) * (k + 1) * ak1,
                 -(alpha + beta + 2) * k * ak, lam * ak]
        res.append(sum(terms[1:], terms[0]))
        scale.append(max(abs(x) for x in terms))
    return res, scale


def scalar_jacobi_ode_residual(sys, alpha: float, beta: float, n: int) -> float:
    """Relative coefficient residual of the scalar Jacobi equation for ``P_n`` (N = 1)."""
    if sys.N != 1:
        raise ValueError("scalar equation needs N = 1")
    asc = [c[0, 0] for c in sys.ascending("L", n)]
    with prec.context(sys.precision):
        if sys.precision == prec.DD:
            import mpmath
            alpha, beta = mpmath.mpf(alpha), mpmath.mpf(beta)
        res, scale = scalar_jacobi_ode_coefficients(asc, alpha, beta, n)
        top = max(scale)
        if top == 0:  # n = 0: every term vanishes identically
            return float(max(abs(r) for r in res))
        return float(max(abs(r) for r in res) / top)


def scalar_q_ode_residual(pl: Pipeline, alpha: float, beta: float, n: int, z: complex) -> float:
    """Relative residual of ``z(1-z)Q'' + (1-a+(a+b-2)z)Q' + (n+1)(a+b+n)Q`` off the cut."""
    ev = pl.ev
    q, dq, d2q = (complex(ev.Q("L", n, z, deriv=k)[0, 0]) for k in range(3))
    terms = (z * (1 - z) * d2q, (1 - alpha + (alpha + beta - 2) * z) * dq, (n + 1) * (alpha + beta + n) * q)
    return abs(sum(terms)) / max(abs(t) for t in terms)


def scalar_pole_matching(alpha: float, beta: float, n: int):
    """``(p^1_n, gamma_n)`` from the two pole conditions of the scalar equation.

    ``p^1_n = -n(a+n)/(a+b+2n)`` and
    ``gamma_n = ((p^1_n + a/2 + n)^2 - a^2/4) / ((a+b+2n)^2 - 1)``.

    Raises
    ------
    DegenerateParameters
        If ``a+b+2n`` is zero or ``(a+b+2n)^2 = 1``.
    """
    s = alpha + beta + 2 * n
    if s == 0 or s * s == 1:
        raise DegenerateParameters(f"alpha + beta + 2n = {s} makes the pole conditions singular")
    p1 = -n * (alpha + n) / s
    gamma = ((p1 + alpha / 2 + n) ** 2 - alpha**2 / 4) / (s * s - 1)
    return p1, gamma


def pole_matching_residual(sys, alpha: float, beta: float, n: int) -> float:
    """Largest deviation of ``(p^1_n, gamma_n)`` from the biorthogonal system values."""
    s = sys.to_double()
    if abs(s.eval_P("L", n, 0.0)[0, 0]) < 1e-12 or abs(s.eval_P("L", n, 1.0)[0, 0]) < 1e-12:
        raise DegenerateParameters("P_n vanishes at an endpoint")
    p1, g = scalar_pole_matching(alpha, beta, n)
    return max(abs(complex(s.p("L", n, 1)[0, 0]) - p1), abs(complex(s.gammaL[n][0, 0]) - g))
