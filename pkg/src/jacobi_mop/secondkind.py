"""Second kind functions ``Q_n`` as Cauchy transforms over [0, 1].

    Q_n^L(z) = int_0^1 P_n^L(t) W(t) / (t - z) dt,
    Q_n^R(z) = int_0^1 W(t) P_n^R(t) / (t - z) dt.

Away from the interval the transforms are plain tanh-sinh sums.  Closer
than ``min_dist`` the evaluator refuses unless asked for the subtracted
form, which removes the near singularity with the analytic continuation
``f(z)`` of the integrand numerator:

    int (f(t) - f(z)) / (t - z) dt + f(z) (log(1 - z) - log(-z)).
"""
from __future__ import annotations

import math

import numpy as np

from . import precision as prec
from .biorth import BiorthSystem
from .moments import MomentTable
from .quadrature import DEFAULT_STEPS, QuadratureNotConverged, tanh_sinh
from .report import ResidualReport
from .weights import PearsonWeight

DEFAULT_MIN_DIST = 0.05


class TooCloseToCut(ValueError):
    pass


class InsufficientMoments(ValueError):
    pass


def dist_to_cut(z: complex) -> float:
    z = complex(z)
    x = min(max(z.real, 0.0), 1.0)
    return abs(z - x)


class CauchyEvaluator:
    """Cached node values of ``P_n W`` and ``W P_n`` for repeated transforms.

    Parameters
    ----------
    sys, w
        Biorthogonal system (any precision; evaluated in double) and weight.
    min_dist
        Smallest distance to [0, 1] accepted by the direct rule.
    tol
        Bound on the relative level-difference error estimate.
    """

    def __init__(self, sys: BiorthSystem, w: PearsonWeight, min_dist: float = DEFAULT_MIN_DIST,
                 tol: float = 1e-10, steps=DEFAULT_STEPS):
        self.sys = sys
        self.w = w
        self.min_dist = min_dist
        self.tol = tol
        self.rule = tanh_sinh(tuple(steps))
        self.W = w.W_nodes(self.rule.t, self.rule.s)
        nmax = sys.n_max + 1
        PL = sys.eval_P_all("L", nmax, self.rule.t)
        PR = sys.eval_P_all("R", nmax, self.rule.t)
        self.fL = [p @ self.W for p in PL]
        self.fR = [self.W @ p for p in PR]

    def _numerator(self, side: str, n: int) -> np.ndarray:
        if n < 0 or n > self.sys.n_max + 1:
            raise IndexError(f"degree {n} outside 0..{self.sys.n_max + 1}")
        return self.fL[n] if side == "L" else self.fR[n]

    def _integrate(self, vals: np.ndarray, kernel: np.ndarray) -> np.ndarray:
        levels = self.rule.estimates(vals * kernel[:, None, None])
        best = levels[-1]
        scale = np.tensordot(self.rule.weights[-1], np.abs(vals) * np.abs(kernel)[:, None, None], axes=(0, 0))
        err = np.linalg.norm(levels[-1] - levels[-2]) / max(np.linalg.norm(scale), 1e-300)
        if err > self.tol:
            raise QuadratureNotConverged(f"Cauchy transform level difference {err:.2e}", worst=err)
        return best

    def Q(self, side: str, n: int, z: complex, deriv: int = 0, near_cut: bool = False) -> np.ndarray:
        """``d^k/dz^k Q_n(z)``; ``near_cut`` enables the subtracted form (``deriv = 0`` only)."""
        z = complex(z)
        d = dist_to_cut(z)
        if d < self.min_dist:
            if not near_cut:
                raise TooCloseToCut(f"distance {d:.3g} to [0,1] below {self.min_dist}")
            if deriv:
                raise TooCloseToCut("derivatives are only evaluated away from the cut")
            return self._near(side, n, z)
        vals = self._numerator(side, n)
        kernel = math.factorial(deriv) / (self.rule.t - z) ** (deriv + 1)
        return self._integrate(vals, kernel)

    def _near(self, side: str, n: int, z: complex) -> np.ndarray:
        if dist_to_cut(z) == 0:
            raise TooCloseToCut("z lies on [0, 1]")
        vals = self._numerator(side, n)
        p = self.sys.eval_P(side, n, z)
        wz = self.w.eval_W_continued(z)[0]
        fz = p @ wz if side == "L" else wz @ p
        kernel = 1.0 / (self.rule.t - z)
        core = self._integrate(vals - fz[None], kernel)
        return core + fz * (np.log(1 - z) - np.log(-z))


def q_expansion(sys: BiorthSystem, table: MomentTable, n: int, order: int, side: str = "L") -> list:
    """Coefficients ``[I, q^1_n, ..., q^order_n]`` of the expansion at infinity.

    ``Q_n^L = -C_n^-1 (z^{-n-1} + q^1 z^{-n-2} + ...)`` with
    ``q^k_{L,n} = C_n <P_n^L, t^{n+k}>``; the right side mirrors it,
    ``q^k_{R,n} = <t^{n+k}, P_n^R> C_n``.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    if 2 * n + order >= len(table):
        raise InsufficientMoments(f"need moment index {2 * n + order}, table has {len(table) - 1}")
    p = sys.precision
    if table.precision != p:
        table = table.to_double() if p == prec.DOUBLE else table
    asc = sys.ascending(side, n)
    out = []
    with prec.context(p):
        for k in range(order + 1):
            j = n + k
            if side == "L":
                m = sum((asc[i] @ table[i + j] for i in range(n + 1)), prec.zeros((sys.N, sys.N), p))
                out.append(sys.C[n] @ m)
            else:
                m = sum((table[i + j] @ asc[i] for i in range(n + 1)), prec.zeros((sys.N, sys.N), p))
                out.append(m @ sys.C[n])
    return out


def q_coeff(sys: BiorthSystem, table: MomentTable, side: str, n: int, k: int):
    return q_expansion(sys, table, n, k, side)[k]


def richardson(values: list, ratio: float = 2.0, order_start: int = 1) -> np.ndarray:
    """Richardson extrapolation to step zero of values at steps ``h, h/ratio, ...``.

    Assumes an error expansion in integer powers ``h**order_start, h**(order_start+1), ...``.
    """
    tab = [np.asarray(v, dtype=complex) for v in values]
    p = order_start
    while len(tab) > 1:
        f = ratio**p
        tab = [(f * tab[i + 1] - tab[i]) / (f - 1) for i in range(len(tab) - 1)]
        p += 1
    return tab[0]


# -- identities ------------------------------------------------------------------------

def q_recurrence_residual(ev: CauchyEvaluator, n: int, z: complex, side: str = "L") -> float:
    """Relative residual of the three-term recurrence carried over to ``Q`` (``n >= 1``).

    Left: ``z Q_n = Q_{n+1} + beta_n Q_n + gamma_n Q_{n-1}``; right:
    ``z Q_n = Q_{n+1} + Q_n beta_n + Q_{n-1} gamma_n``.
    """
    if n < 1:
        raise ValueError("the recurrence is checked for n >= 1 only")
    s = ev.sys
    q0, q1, q2 = (ev.Q(side, k, z) for k in (n - 1, n, n + 1))
    if side == "L":
        terms = (z * q1, q2, s.betaL[n] @ q1, s.gammaL[n] @ q0)
    else:
        terms = (z * q1, q2, q1 @ s.betaR[n], q0 @ s.gammaR[n])
    r = terms[0] - terms[1] - terms[2] - terms[3]
    return float(np.linalg.norm(r) / max(np.linalg.norm(t) for t in terms))


def q_asymptotic_defect(ev: CauchyEvaluator, n: int, z: complex) -> float:
    """``|| z^{n+1} C_n Q_n^L(z) + I ||``, which decays like ``||q^1_n|| / |z|``."""
    z = complex(z)
    q = ev.Q("L", n, z)
    return float(np.linalg.norm(z ** (n + 1) * ev.sys.C[n] @ q + np.eye(ev.sys.N)))


def p1_q1_residual(sys: BiorthSystem, table: MomentTable, n: int) -> float:
    """``max(||p^1_{R,n} + q^1_{L,n-1}||, ||p^1_{L,n} + q^1_{R,n-1}||)`` for ``n >= 1``."""
    if n < 1:
        raise ValueError("the identity needs n >= 1")
    with prec.context(sys.precision):
        a = prec.norm(sys.p("R", n, 1) + q_coeff(sys, table, "L", n - 1, 1))
        b = prec.norm(sys.p("L", n, 1) + q_coeff(sys, table, "R", n - 1, 1))
    return float(max(a, b))


def verify_second_kind(sys: BiorthSystem, table: MomentTable, ev: CauchyEvaluator, points, n_values,
                       far=(50j, -50.0, 100j, 100.0)) -> ResidualReport:
    """Recurrence of ``Q``, its leading asymptotics and the ``p^1``/``q^1`` identities.

    The asymptotic entry records ``|z| || z^{n+1} C_n Q_n + I ||`` against the
    bound 5, i.e. the defect must stay below ``5 / |z|`` for ``|z| >= 50``.
    """
    rep = ResidualReport()
    vals, labels = [], []
    for n in n_values:
        for z in points:
            for side in ("L", "R"):
                vals.append(q_recurrence_residual(ev, n, z, side))
                labels.append(f"{side} n={n} z={z}")
    rep.add("q-recurrence", vals, 1e-8, labels)
    vals = [abs(z) * q_asymptotic_defect(ev, n, z) for n in n_values for z in far]
    rep.add("q-asymptotics", vals, 5.0, [f"n={n} z={z}" for n in n_values for z in far])
    rep.add("p1-q1-identity", [p1_q1_residual(sys, table, n) for n in n_values],
            1e-9 if sys.precision == prec.DOUBLE else 1e-20, [f"n={n}" for n in n_values])
    return rep
