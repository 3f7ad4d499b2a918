"""Weight -> moments -> biorthogonal system -> Cauchy evaluator, bundled."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import precision as prec
from .biorth import BiorthSystem, biorthogonalize
from .moments import MomentTable, compute_moments
from .secondkind import DEFAULT_MIN_DIST, CauchyEvaluator
from .weights import PearsonWeight


@dataclass
class Pipeline:
    """Everything downstream identities need for one weight.

    ``sys`` keeps the working precision; ``sysd`` is its double-precision
    image used for point evaluations.
    """

    w: PearsonWeight
    table: MomentTable
    sys: BiorthSystem
    min_dist: float = DEFAULT_MIN_DIST
    _ev: CauchyEvaluator | None = field(default=None, repr=False)

    @classmethod
    def build(cls, w: PearsonWeight, n_max: int, precision: str = prec.DOUBLE,
              method: str = "quadrature", min_dist: float = DEFAULT_MIN_DIST, **biorth_kw) -> "Pipeline":
        table = compute_moments(w, n_max, precision=precision, method=method)
        sys = biorthogonalize(table, **biorth_kw)
        return cls(w, table, sys, min_dist)

    @property
    def precision(self) -> str:
        return self.sys.precision

    @property
    def N(self) -> int:
        return self.w.N

    @property
    def n_max(self) -> int:
        return self.sys.n_max

    @property
    def sysd(self) -> BiorthSystem:
        return self.sys.to_double()

    @property
    def ev(self) -> CauchyEvaluator:
        if self._ev is None:
            self._ev = CauchyEvaluator(self.sysd, self.w, min_dist=self.min_dist)
        return self._ev

    def h(self, side: str, degree: int | None = None, precision: str | None = None) -> np.ndarray:
        """Pearson coefficients padded to ``degree + 1`` terms, in the requested precision."""
        c = self.w.hL if side == "L" else self.w.hR
        if degree is not None:
            if c.shape[0] > degree + 1:
                raise ValueError(f"h^{side} has degree {c.shape[0] - 1} > {degree}")
            c = np.concatenate([c, np.zeros((degree + 1 - c.shape[0],) + c.shape[1:], dtype=complex)])
        return prec.convert(c, precision or self.precision)
