"""
Transference slack
==================

||T_mu|| against 5 M^2 ||L_mu|| for random even measures, with the exact
p = 2 convolution norm sup |mu^|.
"""

# %%
import numpy as np

from cosred import families, measures, transference
from cosred.phillips import CalcContext

rng = np.random.default_rng(7)
print(f"{'cond':>5s} {'M':>7s} {'max ratio':>10s} {'min slack':>10s}")
for cond in (2.0, 10.0, 50.0):
    ctx = CalcContext.from_matrix(families.similarity([1.0, 4.0], cond))
    ratios, slack = [], []
    for j in range(30):
        mu = measures.random_even_measure(rng, ("atomic", "density", "mixed")[j % 3], support=1.0, step=1e-3)
        rep = transference.transference_check(ctx, mu)
        ratios.append(rep.supremum / rep.comparison)
        slack.append(rep.meta["slack"])
    print(f"{cond:5.0f} {ctx.M:7.3f} {max(ratios):10.4f} {min(slack):10.3f}")

# %% the factorization T_mu = P_n L_mu iota_n on one measure
ctx = CalcContext.from_matrix(families.similarity([1.0, 4.0], 10.0))
mu = measures.symmetric_atoms([0.2, 1.0], [0.5, -0.3])
for step in (4e-3, 2e-3, 1e-3):
    print(f"step {step:.0e}  factorization residual {transference.factorization_residual(ctx, mu, 4.0, 1.0, step):.2e}")
