"""
Principal value for sgn(B) sin(sB)
==================================

(1/pi) PV int Cos(s - r) dr / r on a scalar generator, truncated to
a <= |r| <= b.
"""

# %%
import numpy as np

from cosred import reduction
from cosred.phillips import CalcContext

ctx = CalcContext.from_matrix([[4.0]])
exact = np.sin(1.2)

# %% the error falls like 1/b (sampled at b = k pi where the oscillation phase repeats)
for b in np.pi * np.array([10, 100, 1000]):
    val = reduction.pv_truncated(ctx, 0.6, 1e-9, b)[0, 0].real
    print(f"b = {b:8.1f}  error {abs(val - exact):.2e}")

# %% and like a at the inner cut
for a in (1e-1, 1e-2, 1e-3):
    val = reduction.pv_truncated(ctx, 0.6, a, 1000 * np.pi)[0, 0].real
    print(f"a = {a:6.0e}  error {abs(val - exact):.2e}")

# %% the special functions behind it
print("H(1e4) - pi/2 =", reduction.H(1e4) - np.pi / 2)
print("F(0)         =", reduction.F(0.0))
print("TV(mu_c), c = 0.5, 1, 2:", [round(tv, 6) for _, tv in reduction.mu_c_tv_norms((0.5, 1.0, 2.0))])
