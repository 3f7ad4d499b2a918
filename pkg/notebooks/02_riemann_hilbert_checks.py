# %% [markdown]
# # Riemann-Hilbert checks
#
# ``Y_n`` pairs ``P_n`` with the Cauchy transforms ``Q_n``.  Dressing it with
# the weight factors gives ``Z_n``, whose jumps across (0, 1) and (1, inf) are
# constant matrices.  Its logarithmic derivative ``M_n`` is rational with poles
# only at 0 and 1, so ``Mt_n = z(1-z) M_n`` is a matrix polynomial.

# %%
import numpy as np

from jacobi_mop import Pipeline, nilpotent_alpha, noncommuting_quadratic
from jacobi_mop import precision as prec
from jacobi_mop import rh
from jacobi_mop.odecheck import first_order_residual, second_order_residual

points = (-1.0, -0.5 + 0.5j, 0.5 + 0.5j, 2.0 + 1.0j, 0.3 - 0.4j)

# %% [markdown]
# ## Constant jumps for a nilpotent exponent
# ``t**[[0,1],[0,0]] = [[1, log t], [0, 1]]``.  The jump factor
# ``exp(-2 pi i alpha)`` is unipotent, so the log term produces the
# off-diagonal ``-2 pi i``.

# %%
pl = Pipeline.build(nilpotent_alpha(), 8, prec.DD)
print(np.round(rh.jump_constants(pl.w)[0], 12))
print(rh.verify_Z_jump(pl, (0.3, 0.5, 0.7, 2.0), 2).summary())

# %% [markdown]
# ## Structure matrix, zero curvature and the differential equations

# %%
pl = Pipeline.build(noncommuting_quadratic(), 8, prec.DD)
print(rh.closed_vs_numeric(pl, points, range(1, 6)).summary())
print("zero curvature:", max(rh.zero_curvature_coefficients(pl, n) for n in range(1, 6)))
for n in (1, 4):
    print(first_order_residual(pl, n, points).summary())
    print(second_order_residual(pl, n, points).summary())
