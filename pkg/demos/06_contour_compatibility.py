"""
Contour calculus agrees with the measure calculus
=================================================

Psi(f) from a sector contour against Phi(f) for f holomorphic and decaying
at 0 and infinity.
"""

# %%
import numpy as np

from cosred import families, sector
from cosred.phillips import CalcContext

for name in ("diagonal([0,1,4])", "similarity([1,4],10)", "laplacian_1d(64)"):
    ctx = CalcContext.from_matrix(families.from_spec(families.SHIPPED[name]))
    r = sector.sqrt_identification(ctx)
    comp = [sector.compat_residual(ctx, f) for f in (sector.witness(), sector.z_over_1pz_sq())]
    print(f"{name:22s} compat {max(comp):.1e}  ||B^2-A|| {r.square_residual:.1e}  replay {r.replay_residual:.1e}")

# %% the witness on diag(1, 2): f(1) = 0, f(2) = 2/15
print(np.round(sector.contour_psi(sector.witness(), np.diag([1.0, 2.0])).real, 10))

# %% the strip estimate |Im lam| ||R(lam, A^{1/2})|| <= M' + 2M
A = families.similarity([1.0, 4.0], 10.0)
ctx = CalcContext.from_matrix(A)
fit = sector.strip_bound_fit(A, ctx.M)
print(f"M~ = {fit.M_tilde:.3f}   M' + 2M = {fit.M_prime + 2 * fit.M:.3f}")
