"""Discretized ``L^p(R; X)``: convolution operators, the factorization
``T_mu = P_n L_mu iota_n``, multiplier norms and the Hilbert transform.

Grid functions are sampled at cell centres ``left + (k + 1/2) step`` so a
grid of ``count`` cells covers ``[left, left + count*step]`` exactly and
integrals are midpoint sums.
"""
import math
import struct
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.signal import fftconvolve

from .errors import (
    BoundaryLeakage,
    BoundViolationWarning,
    GridMismatchWarning,
    GridTooCoarse,
    SupportOverflow,
)
from .measures import Density, RealMeasure, _merge_atoms, fourier_transform, tv_norm
from .operator_core import opnorm
from .phillips import apply_measure
from .reduction import BoundScanReport

_HEADER = struct.Struct("<ddQId")
_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class VectorGridFunction:
    left: float
    step: float
    samples: np.ndarray
    p: float = 2.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not 1 <= self.p < math.inf:
            raise ValueError("p must lie in [1, inf)")
        s = np.asarray(self.samples, dtype=complex)
        if s.ndim == 1:
            s = s[:, None]
        object.__setattr__(self, "samples", s)

    @property
    def count(self):
        return self.samples.shape[0]

    @property
    def xdim(self):
        return self.samples.shape[1]

    @property
    def right(self):
        return self.left + self.count * self.step

    @property
    def nodes(self):
        return self.left + (np.arange(self.count) + 0.5) * self.step

    def norm(self, p=None):
        p = self.p if p is None else p
        pointwise = np.linalg.norm(self.samples, axis=1)
        return float((self.step * np.sum(pointwise**p)) ** (1.0 / p))

    def with_samples(self, samples, left=None, **meta):
        return VectorGridFunction(self.left if left is None else left, self.step, samples, self.p, dict(self.meta, **meta))

    def to_bytes(self):
        head = _HEADER.pack(float(self.left), float(self.step), self.count, self.xdim, float(self.p))
        return head + np.ascontiguousarray(self.samples, dtype="<c16").tobytes()

    @classmethod
    def from_bytes(cls, buf):
        left, step, count, xdim, p = _HEADER.unpack_from(buf, 0)
        data = np.frombuffer(buf, dtype="<c16", offset=_HEADER.size, count=count * xdim)
        return cls(left, step, data.reshape(count, xdim).copy(), p)

    @classmethod
    def sample(cls, fn, left, right, step, p=2.0, xdim=None):
        """Cell-centre samples of ``fn`` (scalar or vector valued) on ``[left, right]``."""
        count = int(round((right - left) / step))
        if abs(count * step - (right - left)) > _TOL * max(1.0, abs(right - left)):
            raise GridTooCoarse("interval length is not a multiple of the step")
        t = left + (np.arange(count) + 0.5) * step
        vals = np.asarray(fn(t), dtype=complex)
        if vals.ndim == 1 and xdim is not None and xdim > 1:
            raise ValueError("scalar samples for vector grid")
        return cls(left, step, vals, p)


def _is_multiple(x, step):
    r = x / step
    return abs(r - round(r)) <= _TOL * max(1.0, abs(r))


def _lattice_masses(mu, step):
    """Masses of ``mu`` on the lattice ``k*step`` as ``(k0, masses)``.

    Atoms off the lattice and densities on other lattices are split
    linearly between neighbouring nodes (``GridMismatchWarning``).
    """
    if mu.tail is not None or mu.kernels:
        raise ValueError("convolution operators need measures without tails or Poisson components")
    locs, masses = mu.discrete()
    if locs.size == 0:
        return 0, np.zeros(1, dtype=complex)
    r = locs / step
    k = np.rint(r)
    exact = np.abs(r - k) <= _TOL * np.maximum(1.0, np.abs(r))
    if not np.all(exact):
        warnings.warn("measure support off the grid lattice; splitting masses", GridMismatchWarning, stacklevel=3)
    lo = np.floor(r + _TOL).astype(np.int64)
    frac = np.where(exact, 0.0, r - lo)
    lo = np.where(exact, k.astype(np.int64), lo)
    k0 = int(lo.min())
    k1 = int(lo.max()) + 1
    out = np.zeros(k1 - k0 + 1, dtype=complex)
    np.add.at(out, lo - k0, masses * (1 - frac))
    np.add.at(out, lo - k0 + 1, masses * frac)
    if out[-1] == 0 and out.size > 1:
        out = out[:-1]
    return k0, out


def convolve_op(mu, f, extend=True):
    """``(mu * f)(t) = int f(t - s) mu(ds)`` on the grid of ``f``.

    The output grid is ``f``'s grid widened by the support of ``mu``; with
    ``extend=False`` a result that does not fit raises ``SupportOverflow``.
    Young's inequality ``||mu*f||_p <= TV(mu) ||f||_p`` is checked.
    """
    k0, m = _lattice_masses(mu, f.step)
    out = fftconvolve(m[:, None], f.samples, axes=0) if m.size > 1 else m[0] * f.samples
    left = f.left + k0 * f.step
    g = VectorGridFunction(left, f.step, out, f.p)
    widened = k0 != 0 or m.size > 1
    if widened:
        if not extend:
            lo = -k0
            hi = lo + f.count
            spill = np.abs(np.concatenate([out[: max(lo, 0)], out[hi:]])).max(initial=0.0)
            if spill > 1e-14 * max(1.0, np.abs(out).max()) or lo < 0:
                raise SupportOverflow("convolution leaves the grid of the input")
            g = VectorGridFunction(f.left, f.step, out[lo:hi], f.p)
        else:
            g.meta["extended"] = True
    lhs = g.norm()
    rhs = float(np.abs(m).sum()) * f.norm()
    g.meta["young"] = (lhs, rhs)
    if lhs > rhs * (1 + 1e-9) + 1e-300:
        warnings.warn(f"Young bound violated: {lhs:.6g} > {rhs:.6g}", BoundViolationWarning, stacklevel=2)
    return g


def iota_n(P, x, n, N, step=1e-3, p=2.0):
    """``s -> 1_{[-(N+n), N+n]}(s) Cos(s) x`` on a cell-centred grid."""
    L = N + n
    if not _is_multiple(L, step):
        raise GridTooCoarse(f"support end {L} is not a multiple of the step {step}")
    count = int(round(2 * L / step))
    t = -L + (np.arange(count) + 0.5) * step
    x = np.asarray(x, dtype=complex)
    f = VectorGridFunction(-L, step, P.apply_many(t, x), p)
    bound = (2 * n + 2 * N) ** (1 / p) * P.bound_M * np.linalg.norm(x)
    f.meta["bound"] = bound
    if f.norm() > bound * (1 + 1e-9):
        warnings.warn("||iota_n x|| exceeds (2n+2N)^{1/p} M ||x||", BoundViolationWarning, stacklevel=2)
    return f


def _cos_weighted_apply(P, t, F, w):
    """``sum_k w_k Cos(t_k) F_k`` for rows ``F_k``."""
    if P.is_spectral:
        V, Vi = P.spectral.eigvec_matrix, P.spectral.eigvec_inverse
        Y = F @ Vi.T
        acc = np.zeros(P.dim, dtype=complex)
        for lo in range(0, t.size, 1 << 14):
            sl = slice(lo, lo + (1 << 14))
            c = np.cos(np.abs(t[sl])[:, None] * P.freqs[None, :])
            acc += np.einsum("k,kj,kj->j", w[sl], c, Y[sl])
        return V @ acc
    return sum(wk * (P.eval(tk) @ fk) for tk, fk, wk in zip(t, F, w))


def _window(f, a, b):
    """Indices of cells exactly tiling ``[a, b]``."""
    i0 = (a - f.left) / f.step
    i1 = (b - f.left) / f.step
    if not (_is_multiple(a - f.left, f.step) and _is_multiple(b - f.left, f.step)):
        raise GridTooCoarse(f"[{a}, {b}] is not tiled by the grid cells")
    i0, i1 = int(round(i0)), int(round(i1))
    if i0 < 0 or i1 > f.count:
        raise GridTooCoarse(f"grid does not cover [{a}, {b}]")
    return slice(i0, i1)


def P_n_apply(P, f, n):
    """``(2/n) int_{-n/2}^{n/2} Cos(t) f(t) dt - (1/2n) int_{-n}^{n} f(t) dt``."""
    inner = _window(f, -n / 2, n / 2)
    outer = _window(f, -n, n)
    t = f.nodes[inner]
    w = np.full(t.size, f.step)
    first = _cos_weighted_apply(P, t, f.samples[inner], w)
    second = f.step * f.samples[outer].sum(axis=0)
    return (2.0 / n) * first - second / (2.0 * n)


def factorization_matrix(P, mu, n, N, step=1e-3, p=2.0):
    """``P_n L_mu iota_n`` assembled column by column."""
    cols = []
    for j in range(P.dim):
        e = np.zeros(P.dim, dtype=complex)
        e[j] = 1.0
        f = iota_n(P, e, n, N, step, p)
        cols.append(P_n_apply(P, convolve_op(mu, f), n))
    return np.stack(cols, axis=1)


def factorization_residual(ctx, mu, n, N=None, step=1e-3, probes=None, relative=True):
    """``||T_mu - P_n L_mu iota_n||`` (relative to ``||T_mu||`` by default).

    With ``probes`` the maximum over the given vectors of
    ``||T_mu x - P_n L_mu iota_n x|| / ||x||`` is returned instead of the
    operator norm.
    """
    P = ctx.provider if hasattr(ctx, "provider") else ctx
    lo, hi = mu.support()
    N = max(abs(lo), abs(hi)) if N is None else N
    if max(abs(lo), abs(hi)) > N * (1 + 1e-12):
        raise ValueError("measure support exceeds [-N, N]")
    T = apply_measure(P, mu)
    if probes is None:
        R = opnorm(T - factorization_matrix(P, mu, n, N, step))
    else:
        R = 0.0
        for x in probes:
            x = np.asarray(x, dtype=complex)
            y = P_n_apply(P, convolve_op(mu, iota_n(P, x, n, N, step)), n)
            R = max(R, float(np.linalg.norm(T @ x - y) / np.linalg.norm(x)))
    scale = opnorm(T) if relative else 1.0
    return R / scale if scale > 0 else R


@dataclass
class MultiplierEstimate:
    symbol: str
    p: float
    lower_bound: float
    exact: float | None
    method: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lower_bound < 0:
            raise ValueError("negative norm estimate")
        if self.exact is not None and self.lower_bound > self.exact * (1 + 1e-9):
            raise ValueError("lower bound exceeds the exact value")

    @property
    def value(self):
        return self.exact if self.exact is not None else self.lower_bound


def _sup_abs(fn, t):
    """``sup |fn|`` on the grid ``t`` refined by bounded scalar maximisation."""
    return _refine_sup(fn, t, np.abs(fn(t)))


def _lattice(locs, unit=1e-6):
    """Common lattice step of ``locs`` (multiples of ``unit``), or ``None``."""
    r = locs / unit
    k = np.rint(r)
    if locs.size == 0 or np.any(np.abs(r - k) > 1e-3):
        return None
    g = int(np.gcd.reduce(np.abs(k).astype(np.int64)))
    return g * unit if g > 0 else None


def symbol_sup(mu, max_fft=1 << 24):
    """``sup_t |mu^(t)|``.

    A lattice-supported discrete part has a periodic transform: its sup is
    taken over one period from a zero-padded FFT and refined locally.
    Poisson components add ``w e^{-c|t|}``, which only decays, so the
    window around the origin suffices. Otherwise a dense grid on
    ``[-200, 200]`` is scanned.
    """
    locs, masses = mu.discrete()
    fn = lambda t: fourier_transform(mu, t)
    h = mu.density.step if mu.density is not None and mu.atom_locs.size == 0 else _lattice(locs)
    if h is not None and locs.size:
        k = np.rint(locs / h).astype(np.int64)
        if np.max(np.abs(locs - k * h)) <= 1e-9 * max(1.0, np.abs(locs).max()):
            k0 = k.min()
            span = int(k.max() - k0) + 1
            size = 1 << int(np.ceil(np.log2(max(16 * span, 1024))))
            if size <= max_fft:
                c = np.zeros(size, dtype=complex)
                np.add.at(c, k - k0, masses)
                spec = np.fft.fft(c)
                t = 2 * np.pi * np.arange(size) / (size * h)
                t = np.where(t > np.pi / h, t - 2 * np.pi / h, t)
                vals = spec * np.exp(-1j * t * k0 * h)
                for kern in mu.kernels:
                    vals = vals + kern.weight * np.exp(-kern.scale * np.abs(t))
                order = np.argsort(t)
                return _refine_sup(fn, t[order], np.abs(vals[order]))
    reach = 1.0
    lo, hi = mu.support()
    if np.isfinite(lo):
        reach = max(reach, abs(lo), abs(hi))
    step = min(0.01, 0.1 / reach)
    t = step * np.arange(-int(200 / step), int(200 / step) + 1)
    vals = np.concatenate([np.abs(fn(t[i : i + 4096])) for i in range(0, t.size, 4096)])
    return _refine_sup(fn, t, vals)


def _refine_sup(fn, t, vals, top=8):
    best = float(vals.max())
    for k in np.argsort(vals)[::-1][:top]:
        a = t[max(k - 1, 0)]
        b = t[min(k + 1, t.size - 1)]
        if b <= a:
            continue
        res = optimize.minimize_scalar(
            lambda x: -float(np.abs(fn(np.array([x])))[0]), bounds=(a, b), method="bounded", options={"xatol": 1e-12}
        )
        best = max(best, -float(res.fun))
    return best


def conv_norm(mu, p=2.0, xdim=1, method="auto", probes=64, seed=0, grid_step=1e-2, grid_half=50.0):
    """Norm of ``L_mu`` on ``L^p(R; C^xdim)``.

    ``p = 2`` (Euclidean ``X``): the multiplier norm is ``sup |mu^|``,
    computed on a dense grid with local refinement (``supnorm_exact``).
    Otherwise a lower bound from random probe functions is returned;
    ``power_iteration`` gives the largest modulus of the discrete symbol.
    Every estimate is also capped by ``TV(mu)``.
    """
    tv = tv_norm(mu)
    if method == "auto":
        method = "supnorm_exact" if p == 2 else "probe"
    if method == "supnorm_exact":
        if p != 2:
            raise ValueError("exact multiplier norms are only available for p = 2")
        sup = min(symbol_sup(mu), tv)
        return MultiplierEstimate("fourier", p, sup, sup, method, {"tv": tv})
    k0, m = _lattice_masses(mu, grid_step)
    count = int(2 * grid_half / grid_step)
    if method == "power_iteration":
        size = 1 << int(np.ceil(np.log2(count + m.size)))
        sym = np.fft.fft(m, size)
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        lam = 0.0
        for _ in range(200):
            w = np.fft.ifft(np.abs(sym) ** 2 * np.fft.fft(v))
            lam_new = np.sqrt(np.linalg.norm(w) / np.linalg.norm(v))
            v = w / np.linalg.norm(w)
            if abs(lam_new - lam) <= 1e-13 * lam_new:
                lam = lam_new
                break
            lam = lam_new
        return MultiplierEstimate("fourier", p, float(min(lam, tv)), None, method, {"tv": tv})
    rng = np.random.default_rng(seed)
    best = 0.0
    t = -grid_half + (np.arange(count) + 0.5) * grid_step
    for j in range(probes):
        width = grid_half / 4 * rng.uniform(0.05, 1.0)
        freq = rng.uniform(0, 5)
        amp = rng.standard_normal((1, xdim)) + 1j * rng.standard_normal((1, xdim))
        prof = np.exp(-((t / width) ** 2)) * np.exp(1j * freq * t)
        f = VectorGridFunction(-grid_half, grid_step, prof[:, None] * amp, p)
        g = convolve_op(mu, f)
        best = max(best, g.norm() / f.norm())
    return MultiplierEstimate("fourier", p, float(min(best, tv)), None, "probe", {"tv": tv, "probes": probes, "seed": seed})


def transference_check(ctx, mu, p=2.0, pairs=((8.0, 1.0),)):
    """``||T_mu||`` against ``5 M^2 ||L_mu||`` and the refined ``5 M^2 (1+N/n)^{1/p} ||L_mu||``."""
    if not mu.even:
        raise ValueError("transference needs an even measure")
    P = ctx.provider
    T = opnorm(apply_measure(ctx, mu))
    est = conv_norm(mu, p, P.dim)
    M = P.bound_M
    rep = BoundScanReport("transference", [0.0], [T], 5.0 * M**2 * est.value)
    rep.meta.update(
        M=M,
        conv_norm=est.value,
        certified=est.exact is not None,
        refined=[(n, N, 5.0 * M**2 * (1 + N / n) ** (1 / p) * est.value) for n, N in pairs],
        slack=rep.comparison - T,
    )
    return rep


def _mask_check(f, tol):
    scale = max(np.abs(f.samples).max(), 1e-300)
    edge = max(np.abs(f.samples[0]).max(), np.abs(f.samples[-1]).max())
    if edge > tol * max(scale, 1.0):
        raise BoundaryLeakage(f"samples at the grid ends reach {edge:.3g}")


def hilbert_transform(f, method="fft", pad=16, tol=1e-8):
    """Hilbert transform with symbol ``-i sgn(xi)``.

    ``fft``: multiply the zero-padded transform by ``-i sgn``; the padding
    factor controls the periodic wrap-around of the slowly decaying output.
    ``kernel``: the discrete singular sum ``(2/pi) sum_{k odd} f_{j-k}/k``,
    the cell-centred discretisation of ``(1/pi) PV int f(t-s)/s ds``.
    """
    _mask_check(f, tol)
    n = f.count
    if method == "fft":
        size = pad * n
        F = np.fft.fft(f.samples, size, axis=0)
        xi = np.fft.fftfreq(size)
        F *= (-1j * np.sign(xi))[:, None]
        out = np.fft.ifft(F, axis=0)[:n]
    elif method == "kernel":
        k = np.arange(-(n - 1), n)
        ker = np.where(k % 2 == 1, 2.0 / (np.pi * np.where(k == 0, 1, k)), 0.0)
        out = fftconvolve(ker[:, None], f.samples, axes=0)[n - 1 : 2 * n - 1]
    else:
        raise ValueError(f"unknown method {method!r}")
    return f.with_samples(out)


def multiplier_decomposition_residual(lam, t):
    """``max |e^{-lam|t|} - e^{-a|t|}(cos(st) + h(t) sin(st))|`` with ``h = -i sgn``."""
    lam = complex(lam)
    a, s = lam.real, lam.imag
    if a <= 0:
        raise ValueError("need Re(lam) > 0")
    t = np.asarray(t, float)
    rhs = np.exp(-a * np.abs(t)) * (np.cos(s * t) - 1j * np.sign(t) * np.sin(s * t))
    return float(np.max(np.abs(np.exp(-lam * np.abs(t)) - rhs)))


def multiplier_invariance_check(m, alpha=0.0, beta=1.0, gamma=0.0, grid=None):
    """Sup norms of ``m`` and ``m_{a,b,c}(t) = e^{-iat} m(bt + c)`` (exact in the ``p = 2`` regime)."""
    if beta == 0:
        raise ValueError("beta must be nonzero")
    t = np.linspace(-200, 200, 400001) if grid is None else np.asarray(grid, float)
    base = _sup_abs(m, t)
    moved = lambda x: np.exp(-1j * alpha * x) * m(beta * x + gamma)
    tt = (t - gamma) / beta
    other = _sup_abs(moved, np.sort(tt))
    return (
        MultiplierEstimate("m", 2.0, base, base, "supnorm_exact"),
        MultiplierEstimate(f"m_({alpha},{beta},{gamma})", 2.0, other, other, "supnorm_exact"),
    )


def truncate(mu, k):
    """``1_{[-k, k]} mu`` (atoms and grid masses)."""
    keep = np.abs(mu.atom_locs) <= k
    atoms = _merge_atoms(mu.atom_locs[keep], mu.atom_weights[keep])
    density = None
    if mu.density is not None:
        x, m = mu.masses()
        inside = np.abs(x) <= k + _TOL
        if inside.any():
            i0, i1 = np.argmax(inside), len(inside) - np.argmax(inside[::-1])
            density = Density(x[i0], mu.density.step, m[i0:i1] / mu.density.step)
    return RealMeasure(atoms.atom_locs, atoms.atom_weights, density)


def tv_continuity(ctx, mu, ks):
    """``||T_{mu_k} - T_mu||`` for ``mu_k = 1_{[-k,k]} mu``."""
    T = apply_measure(ctx, mu)
    return [(k, opnorm(apply_measure(ctx, truncate(mu, k)) - T)) for k in ks]


def l2_isometry_ratio(f, method="fft"):
    return hilbert_transform(f, method).norm(2) / f.norm(2)


__all__ = [
    "MultiplierEstimate",
    "VectorGridFunction",
    "conv_norm",
    "convolve_op",
    "factorization_matrix",
    "factorization_residual",
    "hilbert_transform",
    "iota_n",
    "l2_isometry_ratio",
    "multiplier_decomposition_residual",
    "multiplier_invariance_check",
    "P_n_apply",
    "transference_check",
    "truncate",
    "tv_continuity",
]

