"""Subordinated semigroup, the reduction group ``U(s) = e^{-isB}``, sine function
and the principal-value representation of ``S(s) = sgn(B) sin(sB)``.
"""
import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import special

from . import _quad, symbols
from .errors import KernelPeakUnresolved, NoConvergence, OscillationUnresolved
from .measures import RealMeasure, Tail, tv_norm
from .operator_core import opnorm, spectral_apply
from .phillips import apply_measure, define_B, phi

RE_FLOOR = 1e-4
DEFAULT_SCHEDULE = (0.2, 0.1, 0.05, 0.025, 0.0125)


def T_B_poisson(ctx, lam, info=False):
    """``T_B(lam) = (2 lam / pi) int_0^inf Cos(s) / (lam^2 + s^2) ds``.

    This is the Poisson-kernel average of the even family over the whole
    line folded onto ``[0, inf)``. For ``Re lam << |Im lam|`` the kernel
    peaks at ``s = |Im lam|`` with width ``Re lam``; that point is passed to
    the adaptive rule as a breakpoint.
    """
    lam = complex(lam)
    if lam.real <= 0:
        raise ValueError("T_B needs Re(lam) > 0")
    if lam.real < RE_FLOOR:
        raise KernelPeakUnresolved(f"Re(lam) = {lam.real:.3g} below the resolvable floor {RE_FLOOR:g}")
    peak = abs(lam.imag)
    points = (peak,) if peak > 0 else ()
    split = max(10.0, peak + 5.0 * lam.real + 10.0)
    c = 2.0 * lam / np.pi
    val, err = ctx.provider.integrate(lambda s: c / (lam * lam + s * s), 0.0, np.inf, points=points, split=split)
    return (val, err) if info else val


def T_B_oracle(A, lam):
    return spectral_apply(lambda z: np.exp(-complex(lam) * z), A)


def semigroup_residuals(ctx, lam, mu, z=1.0, laguerre_nodes=48):
    """``(||T(lam)T(mu) - T(lam+mu)||, ||int_0^inf e^{-zr} T(r) dr - (z+B)^{-1}||)``.

    The Laplace integral uses Gauss-Laguerre in ``zr``.
    """
    r1 = opnorm(T_B_poisson(ctx, lam) @ T_B_poisson(ctx, mu) - T_B_poisson(ctx, lam + mu))
    x, w = np.polynomial.laguerre.laggauss(laguerre_nodes)
    lap = sum(wk * T_B_poisson(ctx, xk / z) for xk, wk in zip(x, w)) / z
    B = define_B(ctx)
    target = np.linalg.inv(z * np.eye(ctx.dim) + B)
    return r1, opnorm(lap - target)


def _neville(h, vals):
    """Polynomial extrapolation to 0; returns the diagonal of the tableau."""
    n = len(h)
    P = [np.array(v, dtype=complex) for v in vals]
    diag = [P[0]]
    for k in range(1, n):
        for i in range(n - k):
            P[i] = (h[i + k] * P[i] - h[i] * P[i + 1]) / (h[i + k] - h[i])
        diag.append(P[0])
    return diag


def U_boundary(ctx, s, schedule=DEFAULT_SCHEDULE, info=False):
    """``U(s) = lim_{a -> 0+} T_B(a + is)`` by Richardson/Neville extrapolation.

    Successive extrapolants must contract by at least 1.5 per level (once
    above rounding level); otherwise ``NoConvergence``.
    """
    schedule = [float(a) for a in schedule]
    if min(schedule) < RE_FLOOR:
        raise ValueError(f"schedule must stay above {RE_FLOOR:g}")
    if any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be strictly decreasing")
    vals = [T_B_poisson(ctx, complex(a, s)) for a in schedule]
    diag = _neville(schedule, vals)
    diffs = [opnorm(b - a) for a, b in zip(diag, diag[1:])]
    floor = 1e-11 * max(1.0, opnorm(diag[-1]))
    for d0, d1 in zip(diffs, diffs[1:]):
        if d0 > floor and d1 > floor and d0 / d1 < 1.5:
            raise NoConvergence(f"extrapolation differences {diffs} do not contract")
    err = diffs[-1] if diffs else float("inf")
    return (diag[-1], err) if info else diag[-1]


def sine_function(ctx, s):
    """``Sin(s) = int_0^s Cos(r) dr``."""
    s = float(s)
    if s == 0.0:
        return np.zeros((ctx.dim, ctx.dim), dtype=complex)
    val, _ = ctx.provider.integrate(lambda r: 1.0 + 0j, 0.0, s)
    return val


def U_euler(ctx, s, B=None):
    """``U(s) = Cos(s) - i B Sin(s)``."""
    B = define_B(ctx) if B is None else B
    return ctx.provider.eval(s) - 1j * B @ sine_function(ctx, s)


def U_oracle(A, s):
    return spectral_apply(lambda z: np.exp(-1j * s * z), A)


def pv_truncated(ctx, s, a, b, order=8, max_nodes=5_000_000):
    """``(1/pi) int_{a<=|r|<=b} Cos(s - r) / r dr``.

    Folded onto ``[a, b]`` the integrand is ``(Cos(s-r) - Cos(s+r)) / r``.
    Panels are no longer than a quarter period of the fastest mode
    (Gauss-Legendre of the given order), graded geometrically from ``a``.
    """
    if not 0 < a < b:
        raise ValueError("need 0 < a < b")
    P = ctx.provider
    w_max = float(np.max(np.abs(P.freqs))) if P.freqs is not None else np.sqrt(opnorm(P.generator.entries))
    panel = min(1.0, np.pi / (2.0 * max(w_max, 1e-12)))
    edges = [a]
    h = a
    while edges[-1] + h < min(b, a + panel) and h < panel:
        edges.append(edges[-1] + h)
        h *= 2.0
    start = edges[-1]
    npan = int(np.ceil((b - start) / panel))
    if npan * order > max_nodes:
        raise OscillationUnresolved(f"{npan} panels of length {panel:.3g} exceed the node budget")
    edges = np.concatenate([edges[:-1], np.linspace(start, b, max(npan, 1) + 1)])
    x, w = _quad._gl(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    r = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wr = (half[:, None] * w[None, :]).ravel() / r
    nodes = np.concatenate([s - r, s + r])
    weights = np.concatenate([wr, -wr]).astype(complex) / np.pi
    return P.weighted_sum(nodes, weights)


def S_oracle(A, s):
    """``sgn(B) sin(sB)`` through the spectral oracle (``sgn(0) = 0``)."""
    return spectral_apply(lambda z: np.sign(z) * np.sin(s * z), A)


def pv_truncated_oracle(A, s, a, b):
    """Closed form of the truncated integral: ``(2/pi) sin(sB) (Si(bB) - Si(aB))``."""
    return spectral_apply(lambda z: (2 / np.pi) * np.sin(s * z) * (special.sici(b * z)[0] - special.sici(a * z)[0]), A)


# -- special functions ---------------------------------------------------------


def H(t):
    """``int_0^1 sin(st)/s ds = Si(t)``."""
    si, _ = special.sici(np.asarray(t, float))
    return si


def F(t):
    """``Si(|t|) - pi/2 = -int_{|t|}^inf sin(r)/r dr`` (vanishes at infinity)."""
    si, _ = special.sici(np.abs(np.asarray(t, float)))
    return si - np.pi / 2


def G(s, c, t):
    """``sgn(t) sin(st) F(ct)``."""
    if c <= 0:
        raise ValueError("G needs c > 0")
    t = np.asarray(t, float)
    return np.sign(t) * np.sin(s * t) * F(c * t)


def eval_special(kind, *args):
    kind = kind.upper()
    if kind == "H":
        return H(*args)
    if kind == "F":
        return F(*args)
    if kind == "G":
        return G(*args)
    raise ValueError(f"unknown special function {kind!r}")


def mu_c(c, atom_sign=1.0):
    """``atom_sign c^{-1} delta_c + 1_{[c, inf)} r^{-2} dr``.

    With ``atom_sign=-1`` the cosine transform is ``|t| F(ct)``; the TV
    norm is ``2/c`` either way.
    """
    return RealMeasure([float(c)], [atom_sign / c], tail=Tail(2.0, float(c), 1.0))


def G_operator(ctx, s, c):
    """``G_{s,c}(B)`` through the spectral oracle on ``B``'s eigenvalues."""
    return spectral_apply(lambda z: G(s, c, z), ctx.A)


def mu_c_tv_norms(cs=(0.5, 1.0, 2.0, 4.0, 8.0)):
    """``tv_norm(mu_c)`` for each ``c``; should equal ``2/c``."""
    return [(c, tv_norm(mu_c(c))) for c in cs]


def G_h1_distance(s, cs, half_width=400.0, step=0.01):
    """H^1 distance of ``G_{s,c}/(1+t^2)`` to ``-(pi/2) sgn(t) sin(st)/(1+t^2)``."""
    t = np.arange(-half_width, half_width + step / 2, step)
    target = -(np.pi / 2) * np.sign(t) * np.sin(s * t) / (1 + t * t)
    out = []
    for c in cs:
        d = G(s, c, t) / (1 + t * t) - target
        dd = np.gradient(d, step)
        out.append((c, float(np.sqrt(step * np.sum(np.abs(d) ** 2 + np.abs(dd) ** 2)))))
    return out


# -- scans ---------------------------------------------------------------------


@dataclass
class BoundScanReport:
    target: str
    params: list
    norms: list
    comparison: float
    supremum: float = field(init=False)
    satisfied: bool = field(init=False)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.supremum = float(max(self.norms)) if self.norms else 0.0
        self.satisfied = bool(self.supremum <= self.comparison * (1 + 1e-6))

    def rows(self):
        for p, n in zip(self.params, self.norms):
            p = complex(p) if not isinstance(p, (tuple, list)) else complex(p[0], p[1])
            yield p.real, p.imag, n, self.comparison, n <= self.comparison * (1 + 1e-6)

    def to_csv(self):
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["param_re", "param_im", "norm", "bound", "satisfied"])
        for re_, im_, n, b, ok in self.rows():
            wr.writerow([repr(re_), repr(im_), repr(n), repr(b), str(ok).lower()])
        return buf.getvalue()

    def to_json(self):
        d = asdict(self)
        d["params"] = [[complex(p).real, complex(p).imag] if not isinstance(p, (tuple, list)) else list(p) for p in self.params]
        return json.dumps(d, sort_keys=True)


def default_lambda_grid():
    thetas = np.array([0.1, 0.4, 0.7, 1.0, 1.3, 1.47])
    thetas = np.concatenate([thetas, -thetas])
    return [10.0**k * np.exp(1j * th) for k in range(-3, 4) for th in thetas]


def default_s_grid(num=25):
    s = np.logspace(-3, 3, num)
    return list(np.concatenate([-s[::-1], s]))


def bound_scan(ctx, target, grid=None, comparison=None, jobs=1):
    """Norms of ``T_B(lam)``, ``U(s)`` or ``G_{s,c}(B)`` over a grid, against ``5 M^2``."""
    comparison = 5.0 * ctx.M**2 if comparison is None else comparison
    if target == "T_B":
        grid = default_lambda_grid() if grid is None else grid
        fn = lambda lam: opnorm(T_B_poisson(ctx, lam))
    elif target == "U":
        grid = default_s_grid() if grid is None else grid
        B = define_B(ctx)
        fn = lambda s: opnorm(U_euler(ctx, s, B))
    elif target == "G":
        if grid is None:
            grid = [(s, c) for s in (0.1, 1.0, 10.0) for c in (0.01, 0.1, 1.0, 10.0)]
        fn = lambda sc: opnorm(G_operator(ctx, sc[0], sc[1]))
    else:
        raise ValueError(f"unknown scan target {target!r}")
    grid = list(grid)
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            norms = list(ex.map(fn, grid))
    else:
        norms = [fn(g) for g in grid]
    return BoundScanReport(target, grid, [float(n) for n in norms], float(comparison), meta={"M": ctx.M})


def cosine_recovery_residual(ctx, s, B=None):
    """``||Cos(s) - (U(s) + U(-s))/2||`` with the Euler route."""
    B = define_B(ctx) if B is None else B
    return opnorm(ctx.provider.eval(s) - 0.5 * (U_euler(ctx, s, B) + U_euler(ctx, -s, B)))


def generator_residuals(ctx, hs=(1e-2, 1e-3), B=None):
    """``||(U(h) - I)/h + iB||`` for each ``h``; should scale like ``h``."""
    B = define_B(ctx) if B is None else B
    I = np.eye(ctx.dim)
    return [(h, opnorm((U_euler(ctx, h, B) - I) / h + 1j * B)) for h in hs]


def phi_semigroup(ctx, lam):
    """``T_B(lam) = Phi(e^{-lam |t|})``, the calculus route."""
    return phi(ctx, symbols.exp_abs(lam))


def G_measure_operator(ctx, c):
    """``T_{mu_c}`` from the Phillips calculus (tail integrated in closed form per mode)."""
    return apply_measure(ctx, mu_c(c, atom_sign=-1.0))
