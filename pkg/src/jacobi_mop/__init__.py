"""Matrix biorthogonal polynomials for Jacobi-type weights on [0, 1].

Moments, block recurrences, second kind functions, Riemann-Hilbert frames
and the differential and discrete Painleve identities they satisfy, each
checked numerically through residual reports.
"""
__version__ = "0.1.0"

from .biorth import BiorthSystem, HankelSingular, biorthogonalize
from .moments import MomentTable, compute_moments
from .pipeline import Pipeline
from .report import CATALOG, ResidualReport
from .weights import (PearsonWeight, diagonal_jacobi, nilpotent_alpha, noncommuting_quadratic,
                      scalar_jacobi)

__all__ = [
    "BiorthSystem", "HankelSingular", "biorthogonalize", "MomentTable", "compute_moments",
    "Pipeline", "CATALOG", "ResidualReport", "PearsonWeight", "diagonal_jacobi",
    "nilpotent_alpha", "noncommuting_quadratic", "scalar_jacobi",
]
