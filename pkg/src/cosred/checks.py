"""Named numerical checks run by the batch runner.

Each check takes a context, its parameter grid and a seeded generator and
returns rows ``(params, value, bound, tolerance)``; a row passes when
``value <= tolerance``. ``bound`` is the reference quantity the value is
compared with (an oracle value, an analytic constant, or ``None``).
"""
import zlib

import numpy as np

from . import measures, reduction, sector, symbols, transference
from .operator_core import (
    dalembert_residual,
    is_hermitian,
    laplace_recover,
    opnorm,
    resolvent,
    spectral_apply,
    sqrt_oracle,
)
from .phillips import define_B, homomorphism_residual, phi, resolvent_B


def check_seed(seed, name):
    """Independent per-check stream so results do not depend on suite order."""
    return np.random.default_rng([int(seed) & 0xFFFFFFFF, zlib.crc32(name.encode())])


def _cplx(x):
    if isinstance(x, (list, tuple)):
        return complex(x[0], x[1])
    return complex(x)


def _tol(tol, default):
    return default if tol is None else float(tol)


def dalembert(ctx, grid, tol, rng):
    n = int(grid.get("pairs", 200))
    half = float(grid.get("range", 20.0))
    ts = rng.uniform(-half, half, size=(n, 2))
    worst = max(dalembert_residual(ctx.provider, t, s) for t, s in ts)
    return [({"pairs": n, "range": half}, worst, 0.0, _tol(tol, 1e-10))]


def laplace(ctx, grid, tol, rng):
    rows = []
    I = np.eye(ctx.dim)
    for lam in grid.get("lambdas", [0.5, 1.0, 2.0, [1.0, 1.0]]):
        lam = _cplx(lam)
        val, _ = laplace_recover(ctx.provider, lam)
        ref = lam * np.linalg.inv(lam * lam * I + ctx.A)
        rows.append(({"lam_re": lam.real, "lam_im": lam.imag}, opnorm(val - ref) / opnorm(ref), 0.0, _tol(tol, 1e-6)))
    return rows


def homomorphism(ctx, grid, tol, rng):
    n = int(grid.get("pairs", 20))
    kinds = ("atomic", "density", "mixed")
    worst = 0.0
    for j in range(n):
        mu = measures.random_even_measure(rng, kinds[j % 3])
        nu = measures.random_even_measure(rng, kinds[(j + 1) % 3])
        worst = max(worst, homomorphism_residual(ctx, mu, nu))
    return [({"pairs": n}, worst, 0.0, _tol(tol, 1e-6))]


def poisson_subordination(ctx, grid, tol, rng):
    res = grid.get("re", list(np.geomspace(1e-2, 10.0, 7)))
    ims = grid.get("im", list(np.linspace(-10.0, 10.0, 7)))
    worst = 0.0
    for a in res:
        for b in ims:
            lam = complex(a, b)
            ref = reduction.T_B_oracle(ctx.A, lam)
            worst = max(worst, opnorm(reduction.T_B_poisson(ctx, lam) - ref) / opnorm(ref))
    return [({"n_re": len(res), "n_im": len(ims)}, worst, 0.0, _tol(tol, 1e-5))]


def group_routes(ctx, grid, tol, rng):
    ss = grid.get("s", [0.1, -0.1, 1.0, -1.0, np.pi, -np.pi, 10.0, -10.0])
    cond = ctx.provider.condition_number
    B = define_B(ctx)
    worst, rec = 0.0, 0.0
    for s in ss:
        ub = reduction.U_boundary(ctx, s)
        ue = reduction.U_euler(ctx, s, B)
        uo = reduction.U_oracle(ctx.A, s)
        worst = max(worst, opnorm(ub - ue), opnorm(ub - uo), opnorm(ue - uo))
        rec = max(rec, reduction.cosine_recovery_residual(ctx, s, B))
    return [
        ({"quantity": "route_distance", "n_s": len(ss)}, worst, 0.0, _tol(tol, 1e-4 * cond)),
        ({"quantity": "cosine_recovery", "n_s": len(ss)}, rec, 0.0, 1e-6),
    ]


def bound_scan(ctx, grid, tol, rng, jobs=1):
    M = ctx.M
    ceiling = 5.0 * M**2
    sup = max(reduction.bound_scan(ctx, "T_B", jobs=jobs).supremum, reduction.bound_scan(ctx, "U", jobs=jobs).supremum)
    rows = [({"quantity": "sup_norm", "M": M}, sup, ceiling, _tol(tol, ceiling + 1e-6))]
    if is_hermitian(ctx.A):
        rows.append(({"quantity": "hermitian_sup_minus_one", "M": M}, abs(sup - 1.0), 1.0, 1e-6))
    return rows


def transference_(ctx, grid, tol, rng):
    n_meas = int(grid.get("measures", 100))
    n, N, step = float(grid.get("n", 8.0)), float(grid.get("N", 1.0)), float(grid.get("step", 1e-3))
    n_fact = int(grid.get("factorization_measures", 3))
    kinds = ("atomic", "density", "mixed")
    ratio, slack, fact = 0.0, np.inf, 0.0
    for j in range(n_meas):
        mu = measures.random_even_measure(rng, kinds[j % 3], support=N, step=step)
        rep = transference.transference_check(ctx, mu)
        ratio = max(ratio, rep.supremum / rep.comparison)
        slack = min(slack, rep.meta["slack"])
        if j < n_fact:
            fact = max(fact, transference.factorization_residual(ctx, mu, n, N, step))
    return [
        ({"quantity": "norm_over_5M2_conv", "measures": n_meas, "min_slack": float(slack)}, ratio, 1.0, _tol(tol, 1.0 + 1e-9)),
        ({"quantity": "factorization", "n": n, "N": N, "step": step, "measures": n_fact}, fact, 0.0, 1e-5),
    ]


def pv(ctx, grid, tol, rng):
    s = float(grid.get("s", 0.6))
    a, b = float(grid.get("a", 1e-3)), float(grid.get("b", 1e3))
    cond = ctx.provider.condition_number
    val = reduction.pv_truncated(ctx, s, a, b)
    quad = opnorm(val - reduction.pv_truncated_oracle(ctx.A, s, a, b))
    limit = opnorm(val - reduction.S_oracle(ctx.A, s))
    return [
        ({"quantity": "quadrature", "s": s, "a": a, "b": b}, quad, 0.0, 1e-9 * cond),
        ({"quantity": "limit", "s": s, "a": a, "b": b}, limit, 0.0, _tol(tol, 2e-3 * cond)),
    ]


def special(ctx, grid, tol, rng):
    rows = [
        ({"quantity": "H(1e4)"}, abs(reduction.H(1e4) - np.pi / 2), np.pi / 2, 2e-4),
        ({"quantity": "F(0)"}, abs(reduction.F(0.0) + np.pi / 2), -np.pi / 2, 1e-10),
    ]
    for c in grid.get("cs", [0.5, 1.0, 2.0]):
        rows.append(({"quantity": "tv_mu_c", "c": c}, abs(measures.tv_norm(reduction.mu_c(c)) - 2 / c), 2 / c, 1e-8))
    return rows


def compat(ctx, grid, tol, rng):
    cond = ctx.provider.condition_number
    r = sector.sqrt_identification(ctx)
    rows = [({"quantity": "compat_witness"}, sector.compat_residual(ctx, sector.witness()), 0.0, _tol(tol, 1e-6))]
    for name, v in r._asdict().items():
        rows.append(({"quantity": name}, v, 0.0, 1e-6 * cond))
    return rows


def strip(ctx, grid, tol, rng):
    n = int(grid.get("samples", 20))
    lams = rng.uniform(-5, 5, n) + 1j * rng.choice([-1, 1], n) * rng.uniform(0.05, 5, n)
    worst = max(sector.strip_identity_residual(ctx.A, lam) for lam in lams)
    fit = sector.strip_bound_fit(ctx.A, ctx.M)
    return [
        ({"quantity": "strip_identity", "samples": n}, worst, 0.0, _tol(tol, 1e-10)),
        ({"quantity": "M_tilde", "M_prime": fit.M_prime, "M": fit.M}, fit.M_tilde, fit.M_prime + 2 * fit.M, fit.M_prime + 2 * fit.M + 1e-6),
    ]


def _pairs(lam=2.0):
    return [
        ("poisson(1)", measures.poisson(1.0), 1.0),
        (f"two_sided_exponential({lam:g})", measures.two_sided_exponential(lam), 1.0 / lam),
        ("gaussian_density", measures.gaussian_density(), 1.0),
    ]


def multiplier(ctx, grid, tol, rng):
    rows = []
    for name, mu, sup in _pairs():
        est = transference.conv_norm(mu, 2.0, ctx.dim)
        rows.append(({"quantity": "conv_norm", "measure": name}, abs(est.value - sup), sup, _tol(tol, 1e-6)))
    cases = [
        ("exp_abs beta=2", lambda t: np.exp(-np.abs(t)), dict(beta=2.0)),
        ("cos alpha=3", np.cos, dict(alpha=3.0)),
        ("poisson_symbol(2) gamma=1", lambda t: 2.0 / (4.0 + t * t), dict(gamma=1.0)),
    ]
    for name, m, kw in cases:
        base, moved = transference.multiplier_invariance_check(m, **kw)
        rows.append(({"quantity": "invariance", "symbol": name}, abs(moved.value - base.value) / base.value, base.value, _tol(tol, 1e-6)))
    return rows


def sectoriality(ctx, grid, tol, rng):
    phis = grid.get("phis", [np.pi / 2, np.pi / 4, np.pi / 8])
    return [
        ({"phi": float(p)}, worst, bound, bound * (1 + 1e-3))
        for p, worst, bound, _ in sector.sectoriality_angle_check(ctx.A, ctx.M, phis)
    ]


def phi_oracle(ctx, grid, tol, rng):
    cond = ctx.provider.condition_number
    fns = [symbols.poisson_symbol(1.0), symbols.exp_abs(1.0), symbols.regularizer(1), symbols.abs_t()]
    rows = []
    for f in fns:
        ref = spectral_apply(lambda z, f=f: f.eval(np.array([abs(z)]))[0], ctx.A)
        scale = max(opnorm(ref), 1e-300)
        rows.append(({"function": str(f.key[0])}, opnorm(phi(ctx, f) - ref) / scale, 0.0, _tol(tol, 1e-6 * cond)))
    return rows


def resolvent_b(ctx, grid, tol, rng):
    root = sqrt_oracle(ctx.A)
    rows = []
    for lam in grid.get("lambdas", [-1.0, [1.0, 1.0], [-2.0, 0.5]]):
        lam = _cplx(lam)
        ref = resolvent(root, lam)
        rows.append(({"lam_re": lam.real, "lam_im": lam.imag}, opnorm(resolvent_B(ctx, lam) - ref) / opnorm(ref), 0.0, _tol(tol, 1e-6)))
    return rows


REGISTRY = {
    "dalembert": dalembert,
    "laplace": laplace,
    "homomorphism": homomorphism,
    "poisson_subordination": poisson_subordination,
    "group_routes": group_routes,
    "bound_scan": bound_scan,
    "transference": transference_,
    "pv": pv,
    "special": special,
    "compat": compat,
    "strip": strip,
    "multiplier": multiplier,
    "sectoriality": sectoriality,
    "phi_oracle": phi_oracle,
    "resolvent_B": resolvent_b,
}

PARALLEL_AWARE = {"bound_scan"}
