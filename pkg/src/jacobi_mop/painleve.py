"""Non-Abelian discrete Painleve IV system for quadratic Pearson data.

For ``W^R = I`` and ``z(1-z) W' = (h0 + h1 z + h2 z^2) W`` the recursion
coefficients of the left family satisfy two nonlocal matrix equations in
``beta_n``, ``gamma_n`` and the partial sums ``S_m = sum_{k<m} beta_k``.
Written with ``p^1_n = -S_n`` they read

    (2n+1) I + h0 + h2 (g_{n+1} + g_n) + (h2 b_n + h1 - (2n+1) I) b_n
        - S_n - C_n^-1 S_{n+1} C_n
      = [S_n, h2] S_{n+1} - [p^2_n, h2] - [S_n, h1],

    b_n - b_n^2 - g_n (h2 (b_n + b_{n-1}) + h1 - (2n-1) I)
        + (h2 (b_n + b_{n+1}) + h1 - (2n+3) I) g_{n+1}
      = g_n [S_{n-1}, h2] - [S_n, h2] g_{n+1} - [S_n, S_{n+1}].

Several variants are kept side by side (see :data:`VARIANTS`) because the
signs of the two isolated sums and the form of ``p^2_n`` differ between
the commonly quoted statement and what the recurrences imply.  ``beta`` and
``gamma`` always come from a biorthogonal system computed from moments,
never from the sum formulas themselves.

In the commuting case the substitutions

    xi_n = h0/2 + n I + h2 gamma_n + p^1_n,    mu_n = h2 beta_n + h1 - (2n+1) I

turn the system into ``-mu_n beta_n = xi_n + xi_{n+1}`` and
``xi_{n+1}^2 - xi_0^2 = gamma_{n+1} mu_n mu_{n+1}``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import precision as prec
from .biorth import BiorthSystem
from .report import ResidualReport

#: ``corrected``: minus signs on the isolated sums and ``p^2`` from the ordered sum.
#: ``verbatim``: plus signs on the isolated sums and ``p^2`` as the full double sum.
#: ``pre-display``: the two relations before the sums are substituted, with ``p^1, p^2``
#: read directly from the polynomial coefficients.
VARIANTS = ("corrected", "verbatim", "pre-display")


class InsufficientDepth(ValueError):
    pass


class NotCommutative(ValueError):
    pass


class SingularMu(ArithmeticError):
    pass


class StepSingular(ArithmeticError):
    pass


def _comm(a, b):
    return a @ b - b @ a


@dataclass(frozen=True)
class DPIVState:
    """Recursion coefficients and Pearson data for the left family.

    Partial sums are not stored: every accessor recomputes them from the
    sequences in a fixed order, so nonlocal terms carry no accumulated drift.
    ``C`` is optional (forward iteration does not produce it).
    """

    n: int
    betaL: tuple
    gammaL: tuple
    h0: np.ndarray
    h1: np.ndarray
    h2: np.ndarray
    precision: str = prec.DOUBLE
    C: tuple | None = None

    @property
    def N(self) -> int:
        return self.h0.shape[0]

    def _zero(self):
        return prec.zeros((self.N, self.N), self.precision)

    def _eye(self):
        return prec.eye(self.N, self.precision)

    def beta(self, k: int):
        return self.betaL[k] if k >= 0 else self._zero()

    def beta_sum(self, m: int):
        """``sum_{k<m} beta_k`` (zero for ``m <= 0``)."""
        acc = self._zero()
        for k in range(max(m, 0)):
            acc = acc + self.betaL[k]
        return acc

    def gamma_sum(self, m: int):
        acc = self._zero()
        for k in range(max(m, 0)):
            acc = acc + self.gammaL[k]
        return acc

    def beta_square_sum(self, m: int, ordered: bool = True):
        """``sum_{j<k<m} beta_k beta_j`` or, with ``ordered=False``, ``sum_{i,j<m} beta_i beta_j``."""
        acc = self._zero()
        for k in range(max(m, 0)):
            for j in range(k if ordered else m):
                acc = acc + self.betaL[k] @ self.betaL[j]
        return acc

    def p1(self, m: int):
        return -self.beta_sum(m)

    def p2(self, m: int, ordered: bool = True):
        return self.beta_square_sum(m, ordered) - self.gamma_sum(m)


def exact_scalar_h(alpha: float, beta: float, c: float = 0.0, precision: str = prec.DOUBLE) -> np.ndarray:
    """``(h0, h1, h2) = (a, c - a - b, -c)`` for ``t**a (1-t)**b exp(c t)``, formed in ``precision``."""
    with prec.context(precision):
        a, b, cc = (prec.convert(np.array([[x]], dtype=complex), precision) for x in (alpha, beta, c))
        return np.stack([a, cc - a - b, -cc])


def state_from_system(sys: BiorthSystem, h, n: int | None = None) -> DPIVState:
    """Wrap the recursion coefficients of ``sys`` and the quadratic ``h`` (3 x N x N)."""
    h = np.asarray(h)
    if h.shape[0] > 3:
        raise ValueError("h must be at most quadratic")
    p = sys.precision
    hh = prec.zeros((3, sys.N, sys.N), p)
    hh[: h.shape[0]] = prec.convert(h, p)
    n = sys.n_max if n is None else n
    return DPIVState(n, tuple(sys.betaL[: n + 1]), tuple(sys.gammaL[: n + 1]), hh[0], hh[1], hh[2],
                     p, tuple(sys.C[: n + 1]))


def _sides(st: DPIVState, n: int, variant: str, sys: BiorthSystem | None):
    I = st._eye()
    b, g = st.beta, st.gammaL
    h0, h1, h2 = st.h0, st.h1, st.h2
    C = st.C[n]
    Cinv = prec.inv(C) if st.precision == prec.DD else np.linalg.inv(C)
    if variant == "pre-display":
        if sys is None:
            raise ValueError("the pre-display form needs the polynomial coefficients")
        p1 = lambda m: sys.p("L", m, 1) if m >= 1 else st._zero()
        p2 = lambda m: sys.p("L", m, 2) if m >= 2 else st._zero()
        l1 = (2 * n + 1) * (I - b(n)) + h0 + h2 @ (g[n + 1] + g[n] + b(n) @ b(n)) + h1 @ b(n)
        r1 = (_comm(p1(n), h2) @ p1(n + 1) - _comm(p2(n), h2) - _comm(p1(n), h1)
              - p1(n) - Cinv @ p1(n + 1) @ C)
        l2 = b(n) - b(n) @ b(n)
        r2 = (g[n] @ (h2 @ (b(n) + b(n - 1)) + _comm(p1(n - 1), h2) + h1 - (2 * n - 1) * I)
              - (h2 @ (b(n) + b(n + 1)) + _comm(p1(n), h2) + h1 - (2 * n + 3) * I) @ g[n + 1]
              - _comm(p1(n), p1(n + 1)))
        return l1, r1, l2, r2
    S = st.beta_sum
    sign = -1 if variant == "corrected" else 1
    p2 = st.p2(n, ordered=(variant == "corrected"))
    l1 = ((2 * n + 1) * I + h0 + h2 @ (g[n + 1] + g[n]) + (h2 @ b(n) + h1 - (2 * n + 1) * I) @ b(n)
          + sign * S(n) + sign * (Cinv @ S(n + 1) @ C))
    r1 = _comm(S(n), h2) @ S(n + 1) - _comm(p2, h2) - _comm(S(n), h1)
    l2 = (b(n) - b(n) @ b(n) - g[n] @ (h2 @ (b(n) + b(n - 1)) + h1 - (2 * n - 1) * I)
          + (h2 @ (b(n) + b(n + 1)) + h1 - (2 * n + 3) * I) @ g[n + 1])
    r2 = g[n] @ _comm(S(n - 1), h2) - _comm(S(n), h2) @ g[n + 1] - _comm(S(n), S(n + 1))
    return l1, r1, l2, r2


def dpiv_residuals(sys: BiorthSystem, h, n: int, variant: str = "corrected") -> tuple:
    """Frobenius norms ``(r1, r2)`` of left minus right side of both equations at ``n``.

    Parameters
    ----------
    sys
        Biorthogonal system of a weight with ``W^R = I``; its precision is used throughout.
    h
        Quadratic Pearson coefficients ``(h0, h1, h2)``, shape ``(3, N, N)``.
    n
        Index, ``0 <= n`` and ``n + 1 < sys.n_max``.
    variant
        One of :data:`VARIANTS`.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if n < 0 or n + 1 >= sys.n_max:
        raise InsufficientDepth(f"n = {n} needs n + 1 < n_max = {sys.n_max}")
    st = state_from_system(sys, h)
    with prec.context(sys.precision):
        l1, r1, l2, r2 = _sides(st, n, variant, sys)
        return prec.norm(l1 - r1), prec.norm(l2 - r2)


def commutator_terms(sys: BiorthSystem, h, n: int) -> dict:
    """Norms of every bracketed term on the right of both equations."""
    st = state_from_system(sys, h)
    S = st.beta_sum
    with prec.context(sys.precision):
        return {
            "[S_n,h2]S_n+1": prec.norm(_comm(S(n), st.h2) @ S(n + 1)),
            "[p2_n,h2]": prec.norm(_comm(st.p2(n), st.h2)),
            "[S_n,h1]": prec.norm(_comm(S(n), st.h1)),
            "g_n[S_n-1,h2]": prec.norm(st.gammaL[n] @ _comm(S(n - 1), st.h2)),
            "[S_n,h2]g_n+1": prec.norm(_comm(S(n), st.h2) @ st.gammaL[n + 1]),
            "[S_n,S_n+1]": prec.norm(_comm(S(n), S(n + 1))),
        }


def dpiv_report(sys: BiorthSystem, h, ns, variant: str = "corrected", tol: float = 1e-6) -> ResidualReport:
    r1s, r2s = [], []
    for n in ns:
        a, b = dpiv_residuals(sys, h, n, variant)
        r1s.append(a)
        r2s.append(b)
    labels = [f"n={n}" for n in ns]
    rep = ResidualReport()
    rep.add(f"dpiv-1/{variant}", r1s, tol, labels)
    rep.add(f"dpiv-2/{variant}", r2s, tol, labels)
    return rep


# -- commutative reduction ---------------------------------------------------------

@dataclass(frozen=True)
class Reduction:
    """``xi``, ``mu`` (and ``nu`` when requested) for ``k = 0..n+1`` with residual lists for ``k = 0..n``."""

    xi: list
    mu: list
    nu: list | None
    residuals: dict


def _check_commuting(h, tol: float):
    hs = [prec.to_double(x) for x in h]
    scale = max(1.0, max(np.linalg.norm(x) for x in hs))
    for i in range(3):
        for j in range(i + 1, 3):
            c = np.linalg.norm(_comm(hs[i], hs[j]))
            if c > tol * scale**2:
                raise NotCommutative(f"[h{i}, h{j}] has norm {c:.2e}")


def commutative_reduction(sys: BiorthSystem, h, n: int, with_nu: bool = True,
                          commute_tol: float = 1e-12, max_cond: float = 1e12) -> Reduction:
    """Sequences ``xi_k, mu_k`` and the residuals of the reduced relations.

    Residual keys: ``mu`` for ``-mu_k beta_k = xi_k + xi_{k+1}``, ``xi`` for
    ``xi_{k+1}^2 - xi_0^2 = gamma_{k+1} mu_k mu_{k+1}``, ``nu-printed`` and
    ``nu-corrected`` for the two forms of ``nu_k nu_{k+1}``, and ``nu-sum`` for
    the expression of ``xi_k + xi_{k+1}`` through ``nu_k``.

    Raises
    ------
    NotCommutative
        If some ``[h_i, h_j]`` is not negligible.
    SingularMu
        If ``with_nu`` and some ``mu_k`` (or ``h2``) is numerically singular.
    """
    if n < 0 or n + 1 > sys.n_max:
        raise InsufficientDepth(f"n = {n} needs n + 1 <= n_max = {sys.n_max}")
    st = state_from_system(sys, h)
    _check_commuting((st.h0, st.h1, st.h2), commute_tol)
    p = sys.precision
    inv = prec.inv if p == prec.DD else np.linalg.inv
    with prec.context(p):
        I = st._eye()
        h0, h1, h2 = st.h0, st.h1, st.h2
        xi = [h0 / 2 + k * I + h2 @ st.gammaL[k] + st.p1(k) for k in range(n + 2)]
        mu = [h2 @ st.betaL[k] + h1 - (2 * k + 1) * I for k in range(n + 2)]
        res = {"mu": [], "xi": []}
        for k in range(n + 1):
            res["mu"].append(prec.norm(-mu[k] @ st.betaL[k] - xi[k] - xi[k + 1]))
            res["xi"].append(prec.norm(xi[k + 1] @ xi[k + 1] - xi[0] @ xi[0]
                                       - st.gammaL[k + 1] @ mu[k] @ mu[k + 1]))
        nu = None
        if with_nu:
            for m in mu + [h2]:
                c = np.linalg.cond(prec.to_double(m))
                if not np.isfinite(c) or c > max_cond:
                    raise SingularMu(f"condition number {c:.2e} exceeds {max_cond:.0e}")
            nu = [inv(m) for m in mu]
            h2i = inv(h2)
            res.update({"nu-printed": [], "nu-corrected": [], "nu-sum": []})
            for k in range(n + 1):
                den = inv(xi[k + 1] @ xi[k + 1] - xi[0] @ xi[0])
                printed = h2 @ (xi[k + 1] - h0 / 2 - k * I - st.p1(k)) @ den
                fixed = h2i @ (xi[k + 1] - h0 / 2 - (k + 1) * I - st.p1(k + 1)) @ den
                lhs = nu[k] @ nu[k + 1]
                res["nu-printed"].append(prec.norm(lhs - printed))
                res["nu-corrected"].append(prec.norm(lhs - fixed))
                mi = inv(nu[k])
                rhs = (h2i @ h1 - h2i @ mi - (2 * k + 1) * h2i) @ mi
                res["nu-sum"].append(prec.norm(xi[k] + xi[k + 1] - rhs))
    return Reduction(xi, mu, nu, res)


def reduction_report(red: Reduction, tol: float = 1e-7) -> ResidualReport:
    rep = ResidualReport()
    names = {"mu": "dpiv-reduction-mu", "xi": "dpiv-reduction-xi", "nu-printed": "dpiv-reduction-nu/printed",
             "nu-corrected": "dpiv-reduction-nu/corrected", "nu-sum": "dpiv-reduction-nu/sum"}
    for key, vals in red.residuals.items():
        rep.add(names[key], vals, tol, [f"k={k}" for k in range(len(vals))])
    return rep


# -- forward iteration ---------------------------------------------------------------

def dpiv_forward_iterate(h, beta0, n_target: int, precision: str = prec.DOUBLE,
                         singular_tol: float = 1e-300) -> DPIVState:
    """Generate ``beta_n, gamma_n`` up to ``n_target`` from ``beta_0`` and ``gamma_0 = 0``.

    Each step solves the first (commutative) equation for ``gamma_{n+1}`` and
    then the second for ``beta_{n+1}``.  Forward iteration of discrete
    Painleve equations is unstable, so callers should compare the output
    with a moment computation (:func:`agreement_depth`).

    Raises
    ------
    NotCommutative
        For non-commuting ``h``.
    StepSingular
        When ``h2`` or ``h2 gamma_{n+1}`` cannot be inverted.
    """
    h = np.asarray(h)
    with prec.context(precision):
        hh = prec.convert(h, precision)
        _check_commuting(hh, 1e-12)
        h0, h1, h2 = hh
        N = h0.shape[0]
        I = prec.eye(N, precision)
        inv = prec.inv if precision == prec.DD else np.linalg.inv

        def safe_inv(m, what):
            md = prec.to_double(m)
            if prec.norm(m) <= singular_tol or not np.isfinite(np.linalg.cond(md)) or np.linalg.cond(md) > 1e14:
                raise StepSingular(f"{what} is singular")
            return inv(m)

        h2i = safe_inv(h2, "h2")
        b0 = np.asarray(beta0)
        b0 = b0.reshape(N, N) if b0.dtype == object else b0.astype(complex).reshape(N, N)
        betas = [prec.convert(b0, precision)]
        gammas = [prec.zeros((N, N), precision)]
        p1 = [prec.zeros((N, N), precision)]
        for n in range(n_target):
            b = betas[n]
            p1.append(p1[n] - b)
            # (2n+1) + h0 + h2(g_{n+1}+g_n) + (h2 b + h1 - (2n+1)) b + p1_n + p1_{n+1} = 0
            rest = (2 * n + 1) * I + h0 + h2 @ gammas[n] + (h2 @ b + h1 - (2 * n + 1) * I) @ b + p1[n] + p1[n + 1]
            g1 = -h2i @ rest
            bm = betas[n - 1] if n >= 1 else prec.zeros((N, N), precision)
            rest2 = (b - b @ b - gammas[n] @ (h2 @ (b + bm) + h1 - (2 * n - 1) * I)
                     + (h2 @ b + h1 - (2 * n + 3) * I) @ g1)
            gammas.append(g1)
            betas.append(-safe_inv(h2 @ g1, f"h2 gamma_{n + 1}") @ rest2)
        return DPIVState(n_target, tuple(betas), tuple(gammas), h0, h1, h2, precision)


def forward_mismatch(state: DPIVState, sys: BiorthSystem) -> list:
    """Relative mismatch of ``(beta_k, gamma_k)`` against ``sys`` for each common ``k``."""
    out = []
    for k in range(min(state.n, sys.n_max) + 1):
        e = 0.0
        for a, b in ((state.betaL[k], sys.betaL[k]), (state.gammaL[k], sys.gammaL[k])):
            ad, bd = prec.to_double(a), prec.to_double(b)
            e = max(e, float(np.linalg.norm(ad - bd) / max(np.linalg.norm(bd), 1e-300)))
        out.append(e)
    return out


def agreement_depth(state: DPIVState, sys: BiorthSystem, tol: float = 1e-6) -> int:
    """Largest ``k`` such that indices ``0..k`` all agree with ``sys`` within ``tol``."""
    depth = -1
    for k, e in enumerate(forward_mismatch(state, sys)):
        if e > tol:
            break
        depth = k
    return depth


def divergence_index(state: DPIVState, sys: BiorthSystem, threshold: float = 1e-3) -> int | None:
    """First index whose mismatch exceeds ``threshold`` (``None`` if none does)."""
    for k, e in enumerate(forward_mismatch(state, sys)):
        if e > threshold:
            return k
    return None
