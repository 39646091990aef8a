"""Phillips calculus ``T_mu = int Cos(s) mu(ds)`` and the regularized calculus ``Phi``.

``Phi(f) = (1 + A)^n T_g`` where ``g ds`` is the inverse Fourier transform
of ``f(t) (1 + t^2)^{-n}``. The operator ``B = Phi(|t|)`` is the square
root of ``A`` built from the cosine family alone.
"""
import threading
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import symbols
from .errors import (
    BoundViolationWarning,
    HypothesisViolated,
    NotH1,
    NotRegularizable,
    ReducedAccuracyWarning,
    SpectrumTooClose,
    TailNotConverged,
    TailUnresolved,
)
from .measures import FunctionOnLine, bernstein_inverse, convolve, even_part, tv_norm
from .operator_core import CosineProvider, as_matrix, opnorm

MAX_REGULARIZER = 8


@dataclass(eq=False)
class CalcContext:
    """Cosine family plus the settings and cache of the regularized calculus.

    ``regularizer_power=None`` picks the smallest admissible ``n`` per function.
    """

    provider: CosineProvider
    regularizer_power: int | None = None
    n_points: int = 1 << 20
    omega: float | None = None
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @classmethod
    def from_matrix(cls, A, **kw):
        return cls(CosineProvider(A), **kw)

    @property
    def A(self):
        return self.provider.generator.entries

    @property
    def dim(self):
        return self.provider.dim

    @property
    def M(self):
        return self.provider.bound_M

    def cached(self, key, compute):
        if key is None:
            return compute()
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        val = compute()
        with self._lock:
            self._cache[key] = val
        return val

    def anchor_residual(self):
        """``||Phi((1+t^2)^{-1}) - (1+A)^{-1}||``."""
        I = np.eye(self.dim)
        return opnorm(phi(self, symbols.regularizer(1)) - np.linalg.inv(I + self.A))


def apply_measure(ctx, mu, info=False, strict=False):
    """``T_mu = int Cos(s) mu(ds)``.

    Atoms and grid masses are summed exactly against ``Cos``; analytic
    tails and Poisson kernels are integrated adaptively. With ``info`` the
    return is ``(T, record)`` where the record holds the quadrature error,
    ``||T||`` and the bound ``M * TV(mu)``.

    Without a closed tail integral (power-series path) a power-law tail is
    truncated and the cut-off mass bound is added to the error; ``strict``
    raises ``TailUnresolved`` instead.
    """
    P = ctx.provider if isinstance(ctx, CalcContext) else ctx
    locs, masses = mu.discrete()
    if masses.size:
        scale = np.abs(masses).max()
        keep = np.abs(masses) > 1e-20 * scale
        locs, masses = locs[keep], masses[keep]
    T = P.weighted_sum(locs, masses)
    err = 0.0
    if mu.tail is not None:
        tl = mu.tail
        factor = 2.0 if tl.two_sided else 1.0
        kern = lambda s: tl.coefficient * s ** (-tl.exponent)
        try:
            val, e = P.integrate(kern, tl.start, np.inf)
        except TailNotConverged:
            R = tl.start * 1e4
            cut = abs(tl.coefficient) * R ** (1 - tl.exponent) / (tl.exponent - 1)
            if strict:
                raise TailUnresolved(f"no closed tail estimate; truncation at {R:g} costs {P.bound_M * cut:.3g}")
            warnings.warn(f"tail truncated at {R:g}", ReducedAccuracyWarning, stacklevel=2)
            val, e = P.integrate(kern, tl.start, R)
            e += P.bound_M * cut
        T = T + factor * val
        err += factor * e
    for k in mu.kernels:
        kern = lambda s, k=k: k.weight * k.scale / (np.pi * (k.scale**2 + s * s))
        val, e = P.integrate(kern, 0.0, np.inf, split=max(10.0, 20 * k.scale))
        T = T + 2.0 * val
        err += 2.0 * e
    if not info:
        _check_bound(P, T, mu)
        return T
    norm = opnorm(T)
    bound = P.bound_M * tv_norm(mu)
    ok = _check_bound(P, T, mu, norm, bound)
    return T, {"err": err, "norm": norm, "bound": bound, "bound_ok": ok}


def _check_bound(P, T, mu, norm=None, bound=None):
    norm = opnorm(T) if norm is None else norm
    bound = P.bound_M * tv_norm(mu) if bound is None else bound
    ok = norm <= bound * (1 + 1e-9) + 1e-12
    if not ok:
        warnings.warn(f"||T_mu|| = {norm:.6g} exceeds M*TV = {bound:.6g}", BoundViolationWarning, stacklevel=3)
    return ok


def homomorphism_residual(ctx, mu, nu):
    """``||T_mu T_nu - T_{mu*nu}||`` on the even parts of ``mu`` and ``nu``."""
    mu = mu if mu.even else even_part(mu)
    nu = nu if nu.even else even_part(nu)
    lhs = apply_measure(ctx, mu) @ apply_measure(ctx, nu)
    return opnorm(lhs - apply_measure(ctx, convolve(mu, nu)))


def regularizer_power(f):
    """Smallest ``n >= 1`` making ``f (1+t^2)^{-n}`` an ``H^1`` function, from the decay hint."""
    hint = f.decay_hint
    if hint in ("integrable", "bounded"):
        return 1
    if isinstance(hint, tuple) and hint[0] == "polynomial":
        n = int(hint[1]) // 2 + 1
        if n > MAX_REGULARIZER:
            raise NotRegularizable(f"polynomial growth of degree {hint[1]} needs n = {n} > {MAX_REGULARIZER}")
        return n
    raise ValueError(f"unknown decay hint {hint!r}")


def phi(ctx, f, n=None):
    """Regularized calculus ``Phi(f) = (1+A)^n T_g`` with ``g = F^{-1}(f e_n)``.

    ``n`` defaults to the context's fixed power, else the smallest
    admissible one; if the inversion reports the product as not ``H^1``
    larger ``n`` are tried up to 8.
    """
    if not f.even:
        raise ValueError("phi needs an even function")
    n0 = n if n is not None else ctx.regularizer_power or regularizer_power(f)
    key = None if f.key is None else ("phi", f.key, n0, ctx.n_points, ctx.omega)
    return ctx.cached(key, lambda: _phi(ctx, f, n0, n is not None or ctx.regularizer_power is not None))


def _phi(ctx, f, n, fixed):
    I = np.eye(ctx.dim, dtype=complex)
    while True:
        fe = symbols.product(f, symbols.regularizer(n))
        try:
            g = bernstein_inverse(fe, n_points=ctx.n_points, omega=ctx.omega)
            break
        except NotH1:
            if fixed or n >= MAX_REGULARIZER:
                raise NotRegularizable(f"f (1+t^2)^-{n} is not H^1") from None
            n += 1
    T = apply_measure(ctx, g)
    return np.linalg.matrix_power(I + ctx.A, n) @ T


def regularizer_independence(ctx, f, n=None):
    """``||Phi_n(f) - Phi_{n+1}(f)||``."""
    n = n or regularizer_power(f)
    return opnorm(phi(ctx, f, n) - phi(ctx, f, n + 1))


def multiplicativity_residual(ctx, f, g):
    """``||Phi(f) Phi(g) - Phi(f g)||``."""
    return opnorm(phi(ctx, f) @ phi(ctx, g) - phi(ctx, symbols.product(f, g)))


def define_B(ctx):
    """``B = Phi(|t|)``, the square root of ``A`` from the cosine family."""
    return phi(ctx, symbols.abs_t())


def resolvent_B(ctx, lam):
    """``(lam - B)^{-1} = Phi(1/(lam - |t|))``."""
    lam = complex(lam)
    dist = abs(lam.imag) if lam.real >= 0 else abs(lam)
    if dist <= 1e-6:
        raise SpectrumTooClose(f"lambda={lam} is within 1e-6 of [0, inf)")
    return phi(ctx, symbols.resolvent_symbol(lam))


@dataclass
class ConvergenceRecord:
    alphas: list
    errors: list
    slope: float
    monotone: bool
    probe_uniform_error: list
    probe_sup: float


def convergence_lemma_check(ctx, family, limit, x, alphas, probe=None, sup_cap=1e6):
    """Errors ``||f_alpha(B) x - f(B) x||`` along a net ``alpha -> 0``.

    ``family(alpha)`` returns a FunctionOnLine. The sufficient hypotheses
    (locally uniform convergence of ``f_alpha`` and ``f_alpha'`` and a
    uniform bound on ``||f_alpha||_inf + ||f_alpha'||_inf``) are checked on
    the probe set first; failure raises ``HypothesisViolated``.
    """
    alphas = sorted(alphas, reverse=True)
    probe = np.linspace(-10.0, 10.0, 2001) if probe is None else np.asarray(probe, float)
    probe = probe[probe != 0.0]
    fl = limit.eval(probe)
    dl = limit.deriv(probe) if limit.deriv is not None else None
    unif, sups = [], []
    for a in alphas:
        fa = family(a)
        v = fa.eval(probe)
        d = fa.deriv(probe) if fa.deriv is not None else np.gradient(v, probe)
        e = np.max(np.abs(v - fl))
        if dl is not None:
            e = max(e, np.max(np.abs(d - dl)))
        unif.append(float(e))
        sups.append(float(np.max(np.abs(v)) + np.max(np.abs(d))))
    if max(sups) > sup_cap:
        raise HypothesisViolated(f"sup ||f_a|| + ||f_a'|| = {max(sups):.3g} is not uniformly bounded")
    if len(unif) > 1 and unif[-1] > unif[0] and unif[-1] > 1e-12:
        raise HypothesisViolated("f_alpha does not approach f on the probe set")
    x = np.asarray(x, complex)
    target = phi(ctx, limit) @ x
    errors = [float(np.linalg.norm(phi(ctx, family(a)) @ x - target)) for a in alphas]
    errs = np.array(errors)
    a = np.array(alphas)
    good = errs > 1e-14
    slope = float(np.polyfit(np.log(a[good]), np.log(errs[good]), 1)[0]) if good.sum() >= 2 else float("nan")
    last = a <= 10 * a.min()
    tail = errs[last]
    monotone = bool(np.all(np.diff(tail) <= 1e-12 + 1e-9 * tail[:-1]))
    return ConvergenceRecord(list(alphas), errors, slope, monotone, unif, max(sups))


def measure_norm_ok(ctx, mu):
    """``(||T_mu||, M * TV(mu))``."""
    T = apply_measure(ctx, mu)
    return opnorm(T), ctx.M * tv_norm(mu)


def as_context(A_or_ctx, **kw):
    if isinstance(A_or_ctx, CalcContext):
        return A_or_ctx
    if isinstance(A_or_ctx, CosineProvider):
        return CalcContext(A_or_ctx, **kw)
    return CalcContext(CosineProvider(as_matrix(A_or_ctx)), **kw)


__all__ = [
    "CalcContext",
    "ConvergenceRecord",
    "FunctionOnLine",
    "apply_measure",
    "as_context",
    "convergence_lemma_check",
    "define_B",
    "homomorphism_residual",
    "measure_norm_ok",
    "multiplicativity_residual",
    "phi",
    "regularizer_independence",
    "regularizer_power",
    "resolvent_B",
]
