"""
The square root through the measure calculus
============================================

B = Phi(|t|) is built from the cosine family alone; here it is compared
with the eigenvalue square root.
"""

# %%
import numpy as np

from cosred import families, symbols
from cosred.operator_core import spectral_apply, sqrt_oracle
from cosred.phillips import CalcContext, define_B, phi

A = families.similarity([1.0, 4.0], 10.0)
ctx = CalcContext.from_matrix(A)
B = define_B(ctx)
print("B =\n", np.round(B.real, 6))
print("||B^2 - A||          ", np.linalg.norm(B @ B - A, 2))
print("||B - sqrt_oracle(A)||", np.linalg.norm(B - sqrt_oracle(A), 2))

# %% two more symbols: e^{-|t|} -> e^{-B}, lam/(lam^2+t^2) -> lam (lam^2 + A)^{-1}
E = phi(ctx, symbols.exp_abs(1.0))
print("||Phi(e^-|t|) - e^-B||", np.linalg.norm(E - spectral_apply(lambda z: np.exp(-z), A), 2))

lam = 1.5
R = phi(ctx, symbols.poisson_symbol(lam))
print("||Phi(poisson) - resolvent||", np.linalg.norm(R - lam * np.linalg.inv(lam**2 * np.eye(2) + A), 2))
