"""Working precision: IEEE double or double-double.

The double-double mode keeps values as numpy object arrays of
``mpmath.mpc`` evaluated at a 106-bit significand, the precision of a
two-float (hi + lo) representation.  Everything that touches those arrays
must run inside :func:`dd_context`.
"""
from __future__ import annotations

from contextlib import contextmanager, nullcontext

import mpmath
import numpy as np

DOUBLE = "double"
DD = "double-double"
PRECISIONS = (DOUBLE, DD)
DD_BITS = 106


def check(precision: str) -> str:
    if precision not in PRECISIONS:
        raise ValueError(f"precision must be one of {PRECISIONS}, got {precision!r}")
    return precision


@contextmanager
def dd_context():
    with mpmath.workprec(DD_BITS):
        yield


def context(precision: str):
    return dd_context() if check(precision) == DD else nullcontext()


def eps(precision: str) -> float:
    return 2.0**-52 if precision == DOUBLE else 2.0**-104


_to_mpc = np.frompyfunc(lambda x: mpmath.mpc(x), 1, 1)
_to_complex = np.frompyfunc(lambda x: complex(x), 1, 1)


def to_dd(a) -> np.ndarray:
    """Object array of mpc; exact for complex128 input."""
    a = np.asarray(a)
    if a.dtype == object:
        return a
    return _to_mpc(a.astype(complex)).astype(object)


def to_double(a) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype != object:
        return a.astype(complex)
    return _to_complex(a).astype(complex)


def convert(a, precision: str) -> np.ndarray:
    return to_dd(a) if precision == DD else to_double(a)


def eye(n: int, precision: str) -> np.ndarray:
    e = np.eye(n, dtype=complex)
    return to_dd(e) if precision == DD else e


def zeros(shape, precision: str) -> np.ndarray:
    z = np.zeros(shape, dtype=complex)
    return to_dd(z) if precision == DD else z


def _gauss_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gaussian elimination with partial pivoting on object arrays."""
    n = a.shape[0]
    a = a.copy()
    b = b.copy()
    for k in range(n):
        p = k + int(np.argmax([abs(a[i, k]) for i in range(k, n)]))
        if abs(a[p, k]) == 0:
            raise ZeroDivisionError("singular matrix in extended-precision solve")
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
        piv = a[k, k]
        for i in range(k + 1, n):
            f = a[i, k] / piv
            if f != 0:
                a[i, k:] = a[i, k:] - f * a[k, k:]
                b[i] = b[i] - f * b[k]
    x = np.empty_like(b)
    for k in range(n - 1, -1, -1):
        s = b[k] - a[k, k + 1:] @ x[k + 1:] if k + 1 < n else b[k]
        x[k] = s / a[k, k]
    return x


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``a x = b`` in the precision of ``a``."""
    if np.asarray(a).dtype == object:
        return _gauss_solve(np.asarray(a), np.asarray(b, dtype=object))
    return np.linalg.solve(a, b)


def inv(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype == object:
        return _gauss_solve(a, to_dd(np.eye(a.shape[0], dtype=complex)))
    return np.linalg.inv(a)


def singular_values(a: np.ndarray) -> np.ndarray:
    """Singular values as floats, computed in the precision of ``a``."""
    a = np.asarray(a)
    if a.dtype == object:
        m = mpmath.matrix(a.tolist())
        s = mpmath.svd_c(m, compute_uv=False)
        return np.array([float(x) for x in s])
    return np.linalg.svd(a, compute_uv=False)


def norm(a) -> float:
    """Frobenius norm as a float, in either precision."""
    a = np.asarray(a)
    if a.dtype == object:
        return float(mpmath.sqrt(mpmath.fsum(abs(x) ** 2 for x in a.ravel())))
    return float(np.linalg.norm(a.ravel()))
