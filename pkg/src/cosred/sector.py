"""Contour functional calculus on sectors and its compatibility with ``Phi``.

``Psi(f) = (1/2 pi i) int_Gamma f(z) R(z, A^{1/2}) dz`` over the boundary of
the sector ``|arg z| < phi'``, run inward along ``r e^{i phi'}`` and outward
along ``r e^{-i phi'}``. Because ``R(z, A^{1/2}) = 2z R(z^2, A) + R(-z, A^{1/2})``
and the last term integrates to zero, ``Psi`` can be computed from ``A``
alone as ``(1/pi i) int_Gamma f(z) z R(z^2, A) dz``.
"""
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .errors import ContourTooClose
from .measures import FunctionOnLine
from .operator_core import as_matrix, opnorm, resolvent, sqrt_oracle
from .phillips import define_B, phi


@dataclass(frozen=True)
class ContourSpec:
    angle: float = np.pi / 4
    r_min: float = 1e-8
    r_max: float = 1e8
    nodes_per_decade: int = 32

    def __post_init__(self):
        if not 0 < self.angle < np.pi / 2:
            raise ValueError("contour angle must lie in (0, pi/2)")
        if not 0 < self.r_min < 1 < self.r_max:
            raise ValueError("need 0 < r_min < 1 < r_max")

    def halved(self):
        return ContourSpec(self.angle / 2, self.r_min, self.r_max, self.nodes_per_decade)

    def refined(self):
        return ContourSpec(self.angle, self.r_min, self.r_max, 2 * self.nodes_per_decade)

    def radial_rule(self):
        return _radial_rule(self.r_min, self.r_max, self.nodes_per_decade)


@lru_cache(maxsize=16)
def _radial_rule(r_min, r_max, per_decade):
    """Gauss-Legendre in ``log r``: nodes ``r_k`` and weights for ``dr``."""
    order = 16
    decades = np.log10(r_max) - np.log10(r_min)
    panels = max(1, int(np.ceil(decades * per_decade / order)))
    edges = np.linspace(np.log(r_min), np.log(r_max), panels + 1)
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    u = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wu = (half[:, None] * w[None, :]).ravel()
    r = np.exp(u)
    return r, wu * r


@dataclass(frozen=True)
class H0Function:
    """Holomorphic on a sector with ``|f(z)| <= bound * min(|z|^s, |z|^-s)``.

    ``line`` gives the even restriction ``t -> f(|t|)`` used by ``Phi``.
    """

    eval: object
    s: float
    bound: float
    name: str
    deriv: object = None

    def __call__(self, z):
        return self.eval(z)

    def check_decay(self, angle=np.pi / 4, radii=(1e-4, 1e4), slack=1.01):
        for r in radii:
            for th in (-angle, 0.0, angle):
                z = r * np.exp(1j * th)
                if abs(self.eval(z)) > slack * self.bound * min(r**self.s, r**-self.s):
                    return False
        return True

    def line(self):
        def ev(t):
            return np.asarray(self.eval(np.abs(np.asarray(t, float)).astype(complex)), dtype=complex)

        dv = None
        if self.deriv is not None:

            def dv(t):
                t = np.asarray(t, float)
                return np.sign(t) * self.deriv(np.abs(t).astype(complex))

        return FunctionOnLine(ev, dv, even=True, decay_hint="integrable" if self.s > 0.5 else "bounded", key=("h0", self.name))


def witness():
    """``z(z-1)/((1+z)(1+z^2)) = 1/(1+z) - 1/(1+z^2)``."""
    return H0Function(
        lambda z: z * (z - 1) / ((1 + z) * (1 + z * z)),
        1.0,
        2.0,
        "witness",
        lambda z: -1 / (1 + z) ** 2 + 2 * z / (1 + z * z) ** 2,
    )


def z_over_1pz_sq():
    """``z / (1+z)^2``."""
    return H0Function(lambda z: z / (1 + z) ** 2, 1.0, 1.0, "z/(1+z)^2", lambda z: (1 - z) / (1 + z) ** 3)


def zero_function():
    return H0Function(lambda z: 0 * z, 1.0, 0.0, "zero", lambda z: 0 * z)


def _check_clearance(B, gamma):
    ev = np.linalg.eigvals(as_matrix(B))
    for lam in ev:
        r = abs(lam)
        if r <= gamma.r_min:
            continue
        ang = abs(np.angle(lam))
        d = r * np.sin(min(abs(gamma.angle - ang), np.pi / 2))
        if ang >= gamma.angle or d < 1e-3 * r:
            raise ContourTooClose(f"eigenvalue {lam:.6g} is within 1e-3 r of the contour at angle {gamma.angle:.4g}")


def _rays(gamma):
    r, w = gamma.radial_rule()
    up = np.exp(1j * gamma.angle)
    return r, w, up


def contour_psi(f, B, gamma=ContourSpec()):
    """``Psi(f) = (1/2 pi i) int_Gamma f(z) R(z, B) dz`` for ``B`` with spectrum near ``[0, inf)``."""
    B = as_matrix(B)
    _check_clearance(B, gamma)
    n = B.shape[0]
    I = np.eye(n)
    r, w, up = _rays(gamma)
    acc = np.zeros((n, n), dtype=complex)
    for rk, wk in zip(r, w):
        z1 = rk * up
        z2 = rk * up.conjugate()
        # inward along the upper ray, outward along the lower one
        acc -= wk * up * f(z1) * np.linalg.solve(z1 * I - B, I)
        acc += wk * up.conjugate() * f(z2) * np.linalg.solve(z2 * I - B, I)
    return acc / (2j * np.pi)


def contour_psi_from_A(f, A, gamma=ContourSpec()):
    """``Psi(f) = (1/pi i) int_Gamma f(z) z R(z^2, A) dz`` (no square root needed)."""
    A = as_matrix(A)
    n = A.shape[0]
    I = np.eye(n)
    r, w, up = _rays(gamma)
    ev = np.linalg.eigvals(A)
    big = ev[np.abs(ev) > gamma.r_min**2]
    if big.size and np.min(np.abs(np.angle(big))) >= 2 * gamma.angle * (1 - 1e-3):
        raise ContourTooClose("spectrum of A leaves the doubled sector")
    acc = np.zeros((n, n), dtype=complex)
    for rk, wk in zip(r, w):
        for z, dz, sgn in ((rk * up, up, -1.0), (rk * up.conjugate(), up.conjugate(), 1.0)):
            acc += sgn * wk * dz * f(z) * z * np.linalg.solve(z * z * I - A, I)
    return acc / (1j * np.pi)


def cauchy_vanishing(f, B, gamma=ContourSpec()):
    """``||(1/2 pi i) int_Gamma f(z) R(-z, B) dz||`` (should vanish)."""
    B = as_matrix(B)
    n = B.shape[0]
    I = np.eye(n)
    r, w, up = _rays(gamma)
    acc = np.zeros((n, n), dtype=complex)
    for rk, wk in zip(r, w):
        z1, z2 = rk * up, rk * up.conjugate()
        acc -= wk * up * f(z1) * np.linalg.solve(-z1 * I - B, I)
        acc += wk * up.conjugate() * f(z2) * np.linalg.solve(-z2 * I - B, I)
    return opnorm(acc / (2j * np.pi))


def contour_independence(f, B, gamma=ContourSpec()):
    """Changes of ``Psi(f)`` when the angle is halved and when the node density doubles."""
    base = contour_psi(f, B, gamma)
    return opnorm(base - contour_psi(f, B, gamma.halved())), opnorm(base - contour_psi(f, B, gamma.refined()))


def psi_multiplicativity(f, g, B, gamma=ContourSpec()):
    fg = H0Function(lambda z: f(z) * g(z), f.s + g.s, f.bound * g.bound, f"({f.name})*({g.name})")
    return opnorm(contour_psi(f, B, gamma) @ contour_psi(g, B, gamma) - contour_psi(fg, B, gamma))


def compat_residual(ctx, f, gamma=ContourSpec()):
    """``||Psi(f) - Phi(f|_{R_+})||`` with ``Psi`` computed from ``A`` only."""
    return opnorm(contour_psi_from_A(f, ctx.A, gamma) - phi(ctx, f.line()))


def kernel_density(f, s, gamma=ContourSpec()):
    """``g(s) = (1/2pi) int_{Gamma+} f(z) e^{iz|s|} dz + (1/2pi) int_{Gamma-} f(z) e^{-iz|s|} dz``.

    Both rays run outward; ``Gamma+`` is the upper one. ``g ds`` has
    cosine transform ``f(|t|)``.
    """
    s = np.abs(np.atleast_1d(np.asarray(s, float)))
    r, w, up = _rays(gamma)
    z1 = r * up
    z2 = r * up.conjugate()
    f1 = f(z1) * up * w
    f2 = f(z2) * up.conjugate() * w
    out = np.exp(1j * np.outer(s, z1)) @ f1 + np.exp(-1j * np.outer(s, z2)) @ f2
    return out / (2 * np.pi)


def kernel_identity_residual(f, ts=(0.0, 0.5, 1.0, 2.0, 5.0), gamma=ContourSpec(r_min=1e-10, r_max=1e6)):
    """``max_t |int g(s) cos(st) ds - f(|t|)|`` over ``ts``."""
    g = lambda s: kernel_density(f, s, gamma)[0]
    with warnings.catch_warnings():
        # the density has a log singularity at s = 0; quad copes but warns
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return _kernel_identity(f, g, ts)


def _kernel_identity(f, g, ts):
    worst = 0.0
    for t in ts:
        parts = []
        for part in (lambda s: g(s).real, lambda s: g(s).imag):
            head, _ = integrate.quad(lambda s: part(s) * np.cos(t * s), 0.0, 20.0, limit=400, epsabs=1e-12)
            if t > 0:
                tail, _ = integrate.quad(part, 20.0, np.inf, weight="cos", wvar=t, limlst=100)
            else:
                tail, _ = integrate.quad(part, 20.0, np.inf, limit=400)
            parts.append(2.0 * (head + tail))
        val = parts[0] + 1j * parts[1]
        worst = max(worst, abs(val - complex(f(complex(abs(t))))))
    return worst


class SqrtIdentification(NamedTuple):
    square_residual: float
    oracle_residual: float
    replay_residual: float


def sqrt_identification(ctx, gamma=ContourSpec()):
    """``(||B^2 - A||, ||B - A^{1/2}||, ||(1+B)^{-1} - Psi(f) - (1+A)^{-1}||)`` with ``f`` the witness."""
    A = ctx.A
    B = define_B(ctx)
    I = np.eye(ctx.dim)
    sq = opnorm(B @ B - A)
    orc = opnorm(B - sqrt_oracle(A))
    replay = opnorm(np.linalg.inv(I + B) - contour_psi_from_A(witness(), A, gamma) - np.linalg.inv(I + A))
    return SqrtIdentification(sq, orc, replay)


def strip_identity_residual(A, lam, root=None):
    """``||R(lam, A^{1/2}) - 2 lam R(lam^2, A) - R(-lam, A^{1/2})||``."""
    A = as_matrix(A)
    lam = complex(lam)
    root = sqrt_oracle(A) if root is None else root
    lhs = resolvent(root, lam)
    rhs = 2 * lam * resolvent(A, lam * lam) + resolvent(root, -lam)
    return opnorm(lhs - rhs)


def default_strip_grid():
    xs = np.concatenate([-np.logspace(-2, 2, 9), [0.0], np.logspace(-2, 2, 9)])
    ys = np.concatenate([-np.logspace(-3, 2, 11), np.logspace(-3, 2, 11)])
    return [complex(x, y) for x in xs for y in ys]


@dataclass
class StripFit:
    M_tilde: float
    M_prime: float
    M: float
    satisfied: bool


def strip_bound_fit(A, M, grid=None, root=None):
    """Measured ``M~ = sup |Im lam| ||R(lam, A^{1/2})||`` against ``M' + 2M``."""
    A = as_matrix(A)
    root = sqrt_oracle(A) if root is None else root
    grid = default_strip_grid() if grid is None else grid
    mt, mp = 0.0, 0.0
    for lam in grid:
        if abs(lam.imag) < 1e-3:
            raise ValueError("grid must stay 1e-3 away from the real axis")
        R = opnorm(resolvent(root, lam))
        mt = max(mt, abs(lam.imag) * R)
        if lam.real < 0:
            mp = max(mp, abs(lam) * R)
    return StripFit(mt, mp, M, mt <= mp + 2 * M + 1e-6)


def sectoriality_angle_check(A, M, phis=(np.pi / 2, np.pi / 4, np.pi / 8), radii=None, n_angles=24):
    """For each ``phi``: ``sup ||mu R(mu, A)||`` outside the closed sector against ``M / sin(phi/2)``."""
    A = as_matrix(A)
    radii = np.logspace(-3, 3, 25) if radii is None else radii
    out = []
    for p in phis:
        thetas = np.linspace(p * 1.0001, np.pi, n_angles)
        worst = 0.0
        for th in np.concatenate([thetas, -thetas]):
            for r in radii:
                mu = r * np.exp(1j * th)
                worst = max(worst, abs(mu) * opnorm(resolvent(A, mu)))
        bound = M / np.sin(p / 2)
        out.append((p, worst, bound, worst <= bound * (1 + 1e-3)))
    return out
