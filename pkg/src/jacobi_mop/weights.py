"""Jacobi-type matrix weights on [0, 1] given by factored Pearson data.

A weight is ``W(z) = W^L(z) W^R(z)`` with

    W^L(z) = H^L(z) z**alpha W0L,        W^R(z) = W0R (1 - z)**beta H^R(z),

where ``H^L`` and ``H^R`` are matrix polynomials times a scalar exponential
``exp(c z)``.  ``z**alpha`` uses the determination arg z in (0, 2*pi) (cut on
``[0, +inf)``) and ``(1 - z)**beta`` the principal one (cut on ``[1, +inf)``).
Such a weight satisfies ``z(1-z) W' = h^L W + W h^R`` with

    h^L(z) = (1 - z) (z (H^L)' (H^L)^-1 + H^L alpha (H^L)^-1),
    h^R(z) = z ((1 - z) (H^R)^-1 (H^R)' - (H^R)^-1 beta H^R),

recovered here by interpolation and accepted only when they are polynomials.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import mpmath
import numpy as np

from .linalg import (
    BranchSpec,
    Side,
    ZeroBase,
    as_cmat,
    log_cut_positive,
    log_one_minus,
    mat_exp,
    pow_stack,
)


class WeightError(ValueError):
    """Weight data violates an invariant (integrability, nonsingularity...)."""


class NotPolynomial(WeightError):
    """The logarithmic derivative of a weight factor is not a polynomial."""


class EndpointEvaluation(ValueError):
    pass


def poly_eval(coeffs: np.ndarray, z):
    """Evaluate an ascending matrix polynomial ``(deg+1, N, N)`` at scalar or array ``z``."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape + coeffs.shape[1:], dtype=complex)
    for c in coeffs[::-1]:
        out = out * z[..., None, None] + c
    return out


def poly_deriv(coeffs: np.ndarray) -> np.ndarray:
    if coeffs.shape[0] == 1:
        return np.zeros_like(coeffs)
    k = np.arange(1, coeffs.shape[0])
    return coeffs[1:] * k[:, None, None]


def poly_degree(coeffs: np.ndarray, tol: float = 1e-12) -> int:
    scale = max(1.0, float(np.max(np.abs(coeffs))))
    for d in range(coeffs.shape[0] - 1, -1, -1):
        if np.max(np.abs(coeffs[d])) > tol * scale:
            return d
    return 0


def _as_poly(coeffs, n: int) -> np.ndarray:
    c = np.array(coeffs, dtype=complex)
    if c.ndim == 2:
        c = c[None]
    if c.ndim != 3 or c.shape[1:] != (n, n):
        raise WeightError(f"polynomial coefficients must have shape (deg+1, {n}, {n})")
    return c


@dataclass(frozen=True, eq=False)
class PearsonWeight:
    """Factored Pearson data of a matrix weight on [0, 1].

    ``HL``/``HR`` hold ascending polynomial coefficients with shape
    ``(deg+1, N, N)``; ``cL``/``cR`` are the rates of the scalar
    exponential factors of ``H^L`` and ``H^R``.
    """

    alpha: np.ndarray
    beta: np.ndarray
    W0L: np.ndarray
    W0R: np.ndarray
    HL: np.ndarray
    HR: np.ndarray
    cL: complex = 0.0
    cR: complex = 0.0
    name: str = ""
    grid_points: int = field(default=201, repr=False)

    def __post_init__(self):
        alpha = as_cmat(self.alpha)
        n = alpha.shape[0]
        set_ = lambda k, v: object.__setattr__(self, k, v)
        set_("alpha", alpha)
        set_("beta", as_cmat(self.beta))
        set_("W0L", as_cmat(self.W0L))
        set_("W0R", as_cmat(self.W0R))
        set_("HL", _as_poly(self.HL, n))
        set_("HR", _as_poly(self.HR, n))
        set_("cL", complex(self.cL))
        set_("cR", complex(self.cR))
        for nm in ("alpha", "beta", "W0L", "W0R"):
            if getattr(self, nm).shape != (n, n):
                raise WeightError(f"{nm} must be {n}x{n}")
        if np.min(np.linalg.eigvals(alpha).real) <= -1:
            raise WeightError("integrability: every eigenvalue of alpha needs real part > -1")
        if np.min(np.linalg.eigvals(self.beta).real) <= -1:
            raise WeightError("integrability: every eigenvalue of beta needs real part > -1")
        for nm in ("W0L", "W0R"):
            if np.linalg.cond(getattr(self, nm)) > 1e10:
                raise WeightError(f"{nm} must be nonsingular (condition < 1e10)")
        grid = np.linspace(0.0, 1.0, self.grid_points)
        for nm, h in (("H^L", self.H_left(grid)), ("H^R", self.H_right(grid))):
            if np.max(np.linalg.cond(h)) > 1e12:
                raise WeightError(f"{nm} must be nonsingular on [0, 1]")

    @property
    def N(self) -> int:
        return self.alpha.shape[0]

    # -- entire factors -------------------------------------------------
    def H_left(self, z):
        z = np.asarray(z, dtype=complex)
        return poly_eval(self.HL, z) * np.exp(self.cL * z)[..., None, None]

    def H_right(self, z):
        z = np.asarray(z, dtype=complex)
        return poly_eval(self.HR, z) * np.exp(self.cR * z)[..., None, None]

    # -- evaluation -------------------------------------------------------
    def eval_WL(self, z: complex, side: Side = "above") -> np.ndarray:
        """``H^L(z) z**alpha W0L``; ``side`` picks the limit on the positive axis."""
        z = complex(z)
        if z == 0:
            raise ZeroBase("W^L is singular at z = 0")
        za = mat_exp(self.alpha * BranchSpec(side).log(z))
        return self.H_left(z) @ za @ self.W0L

    def eval_WR(self, z: complex, side: Side = "above") -> np.ndarray:
        """``W0R (1-z)**beta H^R(z)``; ``side`` matters only on ``(1, inf)``."""
        z = complex(z)
        if z == 1:
            raise ZeroBase("W^R is singular at z = 1")
        lb = complex(log_one_minus(z, side))
        return self.W0R @ mat_exp(self.beta * lb) @ self.H_right(z)

    def eval_W(self, t: float) -> np.ndarray:
        """Weight on the open interval, boundary value from above."""
        t = float(t)
        if not 0.0 < t < 1.0:
            raise EndpointEvaluation(f"eval_W needs 0 < t < 1, got {t}")
        return self.eval_WL(t, "above") @ self.eval_WR(t, "above")

    def eval_W_continued(self, z) -> np.ndarray:
        """Analytic continuation of ``W`` from (0, 1) into a neighbourhood.

        Uses principal branches for both powers, so the result is analytic
        off ``(-inf, 0] U [1, inf)`` and agrees with :meth:`eval_W` on (0, 1).
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        za = pow_stack(np.log(z), self.alpha)
        zb = pow_stack(np.log(1.0 - z), self.beta)
        out = self.H_left(z) @ za @ self.W0L @ self.W0R @ zb @ self.H_right(z)
        return out

    def W_nodes(self, t: np.ndarray, s: np.ndarray) -> np.ndarray:
        """Weight at real nodes given ``t`` and ``s = 1 - t`` separately."""
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        za = pow_stack(np.log(t), self.alpha)
        zb = pow_stack(np.log(s), self.beta)
        return self.H_left(t) @ za @ (self.W0L @ self.W0R) @ zb @ self.H_right(t)

    def W_nodes_mp(self, ts, ss) -> np.ndarray:
        """Extended-precision weight at nodes; call inside an mpmath precision context."""
        n = self.N
        m = lambda a: mpmath.matrix(np.asarray(a).tolist())
        alpha, beta = m(self.alpha), m(self.beta)
        k = m(self.W0L @ self.W0R)
        hl = [m(c) for c in self.HL]
        hr = [m(c) for c in self.HR]
        cl, cr = mpmath.mpc(self.cL), mpmath.mpc(self.cR)
        diag_a = not np.any(self.alpha - np.diag(np.diag(self.alpha)))
        diag_b = not np.any(self.beta - np.diag(np.diag(self.beta)))
        out = np.empty((len(ts), n, n), dtype=object)

        def power(a, is_diag, lg):
            if is_diag:
                d = mpmath.zeros(n)
                for i in range(n):
                    d[i, i] = mpmath.exp(a[i, i] * lg)
                return d
            return mpmath.expm(a * lg)

        def poly(cs, x):
            acc = mpmath.zeros(n)
            for c in cs[::-1]:
                acc = acc * x + c
            return acc

        for i, (t, s) in enumerate(zip(ts, ss)):
            left = poly(hl, t) * mpmath.exp(cl * t) * power(alpha, diag_a, mpmath.log(t))
            right = power(beta, diag_b, mpmath.log(s)) * poly(hr, t) * mpmath.exp(cr * t)
            w = left * k * right
            out[i] = np.array(w.tolist(), dtype=object)
        return out

    # -- Pearson data -------------------------------------------------------
    def _hl_raw(self, z: complex) -> np.ndarray:
        p = poly_eval(self.HL, z)
        dp = poly_eval(poly_deriv(self.HL), z)
        pinv = np.linalg.inv(p)
        inner = z * (self.cL * np.eye(self.N) + dp @ pinv) + p @ self.alpha @ pinv
        return (1 - z) * inner

    def _hr_raw(self, z: complex) -> np.ndarray:
        q = poly_eval(self.HR, z)
        dq = poly_eval(poly_deriv(self.HR), z)
        qinv = np.linalg.inv(q)
        inner = (1 - z) * (self.cR * np.eye(self.N) + qinv @ dq) - qinv @ self.beta @ q
        return z * inner

    @cached_property
    def h_coeffs(self):
        return derive_h_from_factors(self)

    @property
    def hL(self) -> np.ndarray:
        return self.h_coeffs[0]

    @property
    def hR(self) -> np.ndarray:
        return self.h_coeffs[1]

    def h_degree(self) -> int:
        return max(poly_degree(self.hL), poly_degree(self.hR))


def _interpolate(fn, n: int, m: int) -> np.ndarray:
    """Fit a degree ``m-1`` matrix polynomial to ``fn`` on a circle around 1/2."""
    theta = 2 * np.pi * (np.arange(m) + 0.25) / m
    pts = 0.5 + 0.5 * np.exp(1j * theta)
    vals = np.array([fn(z) for z in pts])
    vander = np.vander(pts, m, increasing=True)
    coeffs = np.linalg.solve(vander, vals.reshape(m, -1)).reshape(m, n, n)
    return coeffs


def derive_h_from_factors(w: PearsonWeight, held_out=(0.37 + 0.21j, -0.6 + 0.45j), tol: float = 1e-9):
    """Polynomial ``h^L``, ``h^R`` of the Pearson equation of ``w``.

    The logarithmic derivatives ``z(1-z)(W^L)'(W^L)^-1`` and
    ``z(1-z)(W^R)^-1(W^R)'`` are interpolated at ``(N+1) deg H + 3`` points
    and must reproduce two held-out points to ``tol``.

    Raises
    ------
    NotPolynomial
        When the held-out check fails.
    """
    n = w.N
    out = []
    for raw, hcoef, label in ((w._hl_raw, w.HL, "h^L"), (w._hr_raw, w.HR, "h^R")):
        deg = hcoef.shape[0] - 1
        m = (n + 1) * deg + 3
        c = _interpolate(raw, n, m)
        for z in held_out:
            ref = raw(z)
            err = np.linalg.norm(poly_eval(c, z) - ref) / max(1.0, np.linalg.norm(ref))
            if err > tol:
                raise NotPolynomial(f"{label} is not a polynomial of degree < {m} (held-out error {err:.2e})")
        d = poly_degree(c)
        c = c[: d + 1].copy()
        c[np.abs(c) < 1e-14 * max(1.0, float(np.max(np.abs(c))))] = 0
        out.append(c)
    return out[0], out[1]


def h_eval(coeffs: np.ndarray, z):
    return poly_eval(coeffs, z)


def pearson_residual(w: PearsonWeight, t: float) -> float:
    """Relative Frobenius residual of ``t(1-t)W' - h^L W - W h^R``.

    ``W'`` is a fourth-order central difference.
    """
    t = float(t)
    if not 1e-3 <= t <= 1 - 1e-3:
        raise EndpointEvaluation("residual points must stay 1e-3 away from the endpoints")
    h = 1e-5 * min(1.0, 10 * min(t, 1 - t))
    f = lambda x: w.eval_W(x)
    dw = (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h)
    wt = f(t)
    r = t * (1 - t) * dw - h_eval(w.hL, t) @ wt - wt @ h_eval(w.hR, t)
    return float(np.linalg.norm(r) / np.linalg.norm(wt))


def left_jump_factor(w: PearsonWeight) -> np.ndarray:
    """``(W^L)_+^-1 (W^L)_-`` on (0, inf): ``W0L^-1 exp(2 pi i alpha) W0L``."""
    return np.linalg.solve(w.W0L, mat_exp(2j * math.pi * w.alpha) @ w.W0L)


def folded_left_h(w: PearsonWeight, tol: float = 1e-12) -> np.ndarray:
    """Quadratic-or-lower ``h`` with ``z(1-z) W' = h W``.

    Requires ``h^R`` to be a multiple of the identity in every coefficient
    (in particular ``W^R = I``), so it can be moved to the left.
    """
    hl, hr = w.hL, w.hR
    n = w.N
    for c in hr:
        if np.linalg.norm(c - c[0, 0] * np.eye(n)) > tol * max(1.0, np.linalg.norm(c)):
            raise WeightError("h^R is not scalar; the weight does not reduce to W^R = I")
    deg = max(hl.shape[0], hr.shape[0])
    out = np.zeros((max(deg, 3), n, n), dtype=complex)
    out[: hl.shape[0]] += hl
    out[: hr.shape[0]] += hr
    return out


# -- shipped constructors ---------------------------------------------------

def _eye(n):
    return np.eye(n, dtype=complex)


def scalar_jacobi(a: float, b: float, c: float = 0.0, name: str = "") -> PearsonWeight:
    """``t**a (1-t)**b exp(c t)`` as a 1x1 weight (exponential put in ``H^L``)."""
    one = np.ones((1, 1))
    return PearsonWeight(alpha=a * one, beta=b * one, W0L=one, W0R=one,
                         HL=one[None], HR=one[None], cL=c, name=name or f"jacobi({a},{b},{c})")


def diagonal_jacobi(alphas, betas, name: str = "") -> PearsonWeight:
    n = len(alphas)
    return PearsonWeight(alpha=np.diag(alphas), beta=np.diag(betas), W0L=_eye(n), W0R=_eye(n),
                         HL=_eye(n)[None], HR=_eye(n)[None], name=name or "block-diagonal")


def nilpotent_alpha(name: str = "nilpotent") -> PearsonWeight:
    """``t**[[0,1],[0,0]] = [[1, log t], [0, 1]]`` with trivial remaining factors."""
    return PearsonWeight(alpha=[[0, 1], [0, 0]], beta=np.zeros((2, 2)), W0L=_eye(2), W0R=_eye(2),
                         HL=_eye(2)[None], HR=_eye(2)[None], name=name)


def noncommuting_quadratic(a1=0.5, a2=0.25, c=0.7, k=0.6, w0=((1.0, 0.3), (-0.2, 1.0)),
                           name: str = "noncommuting") -> PearsonWeight:
    """``exp(c t)(I + k t E12) t**diag(a1, a2) W0L`` with ``W^R = I``.

    Its ``h^L`` is quadratic with ``h2 = [[-c, -k(1 + a2 - a1)], [0, -c]]``,
    which does not commute with ``h0 = diag(a1, a2)``.
    """
    e12 = np.array([[0, 1], [0, 0]], dtype=complex)
    hl = np.stack([_eye(2), k * e12])
    return PearsonWeight(alpha=np.diag([a1, a2]), beta=np.zeros((2, 2)), W0L=np.array(w0),
                         W0R=_eye(2), HL=hl, HR=_eye(2)[None], cL=c, name=name)
