"""Nested tanh-sinh (double exponential) rules on [0, 1].

Nodes are generated on the finest step and tagged with the coarsest level
they belong to, so the three nested estimates come from one set of
integrand evaluations.  Abscissae are kept together with their distance to
the right endpoint (``s = 1 - t``) so that ``(1 - t)**beta`` is evaluated
without cancellation.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from scipy.special import expit

DEFAULT_STEPS = (2.0**-6, 2.0**-7, 2.0**-8)
DEFAULT_CLIP = 1e-300


class QuadratureNotConverged(ArithmeticError):
    def __init__(self, message: str, worst: float | None = None):
        super().__init__(message)
        self.worst = worst


@dataclass(frozen=True)
class TanhSinhRule:
    t: np.ndarray
    s: np.ndarray
    weights: tuple  # one weight vector per level, zero off-level
    steps: tuple

    def __len__(self):
        return self.t.size

    def estimates(self, values: np.ndarray) -> list:
        """Integral estimates per level for node values of shape ``(nodes, ...)``."""
        out = []
        for w in self.weights:
            out.append(np.tensordot(w, values, axes=(0, 0)))
        return out


@lru_cache(maxsize=8)
def tanh_sinh(steps: tuple = DEFAULT_STEPS, clip: float = DEFAULT_CLIP) -> TanhSinhRule:
    """Double-precision nested rule; ``steps`` must halve from level to level."""
    h = steps[-1]
    for a, b in zip(steps, steps[1:]):
        if abs(a / b - 2.0) > 1e-12:
            raise ValueError("steps must halve between levels")
    # largest u with both t and 1 - t above clip
    umax = np.arcsinh(-np.log(clip) / np.pi)
    k = np.arange(-int(umax / h), int(umax / h) + 1)
    u = k * h
    v = 0.5 * np.pi * np.sinh(u)
    t = expit(2.0 * v)
    s = expit(-2.0 * v)
    dens = np.pi * np.cosh(u) * t * s
    keep = (t >= clip) & (s >= clip) & (dens > 0)
    k, t, s, dens = k[keep], t[keep], s[keep], dens[keep]
    weights = []
    nlev = len(steps)
    for lev, step in enumerate(steps):
        stride = 2 ** (nlev - 1 - lev)
        mask = (k % stride) == 0
        weights.append(np.where(mask, step * dens, 0.0))
    return TanhSinhRule(t=t, s=s, weights=tuple(weights), steps=tuple(steps))


@lru_cache(maxsize=4)
def tanh_sinh_mp(steps: tuple, prec: int, clip_exp: int = -400):
    """Extended-precision rule: lists of mpf ``(t, s, w_level...)``.

    ``clip_exp`` is the base-10 exponent below which endpoint distances are
    dropped.
    """
    with mpmath.workprec(prec):
        h = mpmath.mpf(steps[-1])
        clip = mpmath.mpf(10) ** clip_exp
        umax = mpmath.asinh(-mpmath.log(clip) / mpmath.pi)
        kmax = int(umax / h)
        nlev = len(steps)
        ts, ss, ws = [], [], [[] for _ in steps]
        for k in range(-kmax, kmax + 1):
            u = k * h
            v = mpmath.pi / 2 * mpmath.sinh(u)
            t = 1 / (1 + mpmath.exp(-2 * v))
            s = 1 / (1 + mpmath.exp(2 * v))
            if t < clip or s < clip:
                continue
            dens = mpmath.pi * mpmath.cosh(u) * t * s
            ts.append(t)
            ss.append(s)
            for lev, step in enumerate(steps):
                stride = 2 ** (nlev - 1 - lev)
                ws[lev].append(mpmath.mpf(step) * dens if k % stride == 0 else mpmath.mpf(0))
        return ts, ss, ws
