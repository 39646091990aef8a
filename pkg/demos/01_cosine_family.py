"""
Cosine families of small matrices
=================================

Cos(t) = cos(t sqrt(A)) for a few generators, the d'Alembert law and the
bound M = sup ||Cos(t)||.
"""

# %% imports
import numpy as np

from cosred import families
from cosred.operator_core import dalembert_residual, estimate_bound_M

# %% a scalar, a diagonal and a non-normal similarity
names = ["scalar(4)", "diagonal([0,1,4])", "similarity([1,4],10)"]
for name in names:
    A, P = families.generate_family(families.SHIPPED[name])
    print(f"{name:24s} Cos(1) =\n{np.round(P.eval(1.0).real, 4)}")

# %% d'Alembert: Cos(t+s) + Cos(t-s) = 2 Cos(t) Cos(s)
rng = np.random.default_rng(0)
A, P = families.generate_family(families.SHIPPED["similarity([1,4],10)"])
worst = max(dalembert_residual(P, t, s) for t, s in rng.uniform(-20, 20, (200, 2)))
print("max d'Alembert residual", worst)

# %% the bound grows with the eigenvector condition number
for cond in (1.0, 2.0, 10.0, 50.0):
    A, P = families.generate_family({"kind": "similarity", "spectrum": [1.0, 4.0], "cond": cond})
    print(f"cond(S) = {cond:5.1f}   M = {estimate_bound_M(P):8.3f}")
