"""Independent reference computations used by the tests.

Nothing here imports the package: rational moments and Gram-Schmidt on
monomials with ``fractions.Fraction``, and closed-form integrals.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial


def beta_moments(a: int, b: int, count: int) -> list:
    """``int_0^1 t^(n+a) (1-t)^b dt`` for integer ``a, b >= 0`` as exact fractions."""
    return [Fraction(factorial(n + a) * factorial(b), factorial(n + a + b + 1)) for n in range(count)]


def _solve(mat, rhs):
    """Gauss-Jordan elimination over the rationals."""
    n = len(mat)
    a = [row[:] + [r] for row, r in zip(mat, rhs)]
    for c in range(n):
        piv = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c] / a[c][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [a[i][n] / a[i][i] for i in range(n)]


def monic_orthogonal(moments: list, n: int) -> list:
    """Ascending coefficients of the monic degree-``n`` orthogonal polynomial (scalar)."""
    if n == 0:
        return [Fraction(1)]
    hank = [[moments[j + k] for j in range(n)] for k in range(n)]
    rhs = [-moments[n + k] for k in range(n)]
    return _solve(hank, rhs) + [Fraction(1)]


def recurrence(moments: list, n_max: int) -> tuple:
    """Exact ``(beta_n, gamma_n)`` for ``n <= n_max`` from the monic polynomials.

    ``beta_n = p1_n - p1_{n+1}`` with ``p1`` the subleading coefficient, and
    ``gamma_n = h_n / h_{n-1}`` with ``h_n = <P_n, t^n>``.
    """
    polys = [monic_orthogonal(moments, n) for n in range(n_max + 2)]
    sub = [p[-2] if len(p) > 1 else Fraction(0) for p in polys]
    h = [sum(c * moments[i + n] for i, c in enumerate(polys[n])) for n in range(n_max + 1)]
    betas = [sub[n] - sub[n + 1] for n in range(n_max + 1)]
    gammas = [Fraction(0)] + [h[n] / h[n - 1] for n in range(1, n_max + 1)]
    return betas, gammas, polys
