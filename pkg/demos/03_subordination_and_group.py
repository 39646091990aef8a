"""
Subordinated semigroup and the group U(s)
=========================================

T_B(lam) = e^{-lam B} from the Poisson average of Cos, then U(s) = e^{-isB}
by boundary extrapolation and by Cos(s) - i B Sin(s).
"""

# %%
import numpy as np

from cosred import families, reduction
from cosred.phillips import CalcContext, define_B

A = families.similarity([1.0, 4.0], 10.0)
ctx = CalcContext.from_matrix(A)
B = define_B(ctx)

for lam in (1.0, 0.5 + 2j, 0.05 + 8j):
    err = np.linalg.norm(reduction.T_B_poisson(ctx, lam) - reduction.T_B_oracle(A, lam), 2)
    print(f"lam = {lam!s:10s} ||T_B - e^(-lam B)|| = {err:.2e}")

# %% the two routes to U(s)
print(f"{'s':>6s} {'boundary-euler':>15s} {'euler-oracle':>13s}")
for s in (0.1, 1.0, np.pi, 10.0):
    ub = reduction.U_boundary(ctx, s)
    ue = reduction.U_euler(ctx, s, B)
    uo = reduction.U_oracle(A, s)
    print(f"{s:6.3f} {np.linalg.norm(ub - ue, 2):15.2e} {np.linalg.norm(ue - uo, 2):13.2e}")

# %% Cos(s) = (U(s) + U(-s)) / 2
print("cosine recovery", max(reduction.cosine_recovery_residual(ctx, s, B) for s in (0.3, 2.0, 7.0)))

# %% sup norms against 5 M^2
scan = reduction.bound_scan(ctx, "T_B")
print(f"sup ||T_B|| = {scan.supremum:.3f}  <=  5 M^2 = {scan.comparison:.3f}")
