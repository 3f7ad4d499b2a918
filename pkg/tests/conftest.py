import functools

import numpy as np
import pytest

from jacobi_mop import precision as prec
from jacobi_mop.pipeline import Pipeline
from jacobi_mop.weights import (PearsonWeight, diagonal_jacobi, nilpotent_alpha,
                                noncommuting_quadratic, scalar_jacobi)


def scalar_matrix_weight():
    """``t^(1/2) (1-t)^(1/3) e^t W0`` with every Pearson coefficient a multiple of I."""
    eye = np.eye(2)
    return PearsonWeight(alpha=0.5 * eye, beta=eye / 3, W0L=np.array([[1.0, 0.3], [-0.2, 1.0]]), W0R=eye,
                         HL=eye[None], HR=eye[None], cL=1.0, name="scalar-matrix")


WEIGHTS = {
    "legendre": lambda: scalar_jacobi(0.0, 0.0, name="legendre"),
    "jacobi": lambda: scalar_jacobi(0.5, 1.0, name="jacobi"),
    "jacobi_exp": lambda: scalar_jacobi(0.5, 1 / 3, 1.0, name="jacobi_exp"),
    "block_diagonal": lambda: diagonal_jacobi([0.0, 0.5], [0.0, 1.0]),
    "nilpotent": nilpotent_alpha,
    "noncommuting": noncommuting_quadratic,
    "scalar_matrix": scalar_matrix_weight,
}
SHIPPED = ("legendre", "jacobi", "jacobi_exp", "block_diagonal", "nilpotent", "noncommuting")
OFF_CUT = (-1.0, -0.5 + 0.5j, 0.5 + 0.5j, 2.0 + 1.0j, 0.3 - 0.4j)


@functools.lru_cache(maxsize=None)
def pipeline(name: str, precision: str = prec.DD, n_max: int = 8) -> Pipeline:
    return Pipeline.build(WEIGHTS[name](), n_max, precision)


@pytest.fixture(scope="session")
def get_pipeline():
    return pipeline
