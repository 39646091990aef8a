"""Matrix generators, their cosine families, resolvents and the spectral oracle.

The generator convention follows the ``-A`` form: ``A`` has spectrum in
``[0, inf)`` and ``Cos(t) = cos(t A^{1/2})`` solves ``u'' = -A u``.
"""
import threading
import warnings
from dataclasses import dataclass, field
from math import factorial

import numpy as np
from scipy import optimize

from . import _quad
from .errors import (
    NegativeSpectrum,
    NonDiagonalizable,
    ReducedAccuracyWarning,
    SpectrumHit,
    TailNotConverged,
)

SPECTRUM_TOL = 1e-8
COND_LIMIT = 1e8


def as_matrix(A):
    """Return ``A`` as a 2-D complex ndarray (accepts scalars and DenseOperator)."""
    M = np.asarray(A, dtype=complex)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return M


def opnorm(M):
    """Operator 2-norm (largest singular value)."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """A square complex matrix acting on ``C^n``."""

    entries: np.ndarray

    def __post_init__(self):
        M = as_matrix(self.entries)
        if not np.all(np.isfinite(M)):
            raise ValueError("operator entries must be finite")
        object.__setattr__(self, "entries", M)

    @property
    def dim(self):
        return self.entries.shape[0]

    def norm(self):
        return opnorm(self.entries)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


@dataclass(frozen=True, eq=False)
class SpectralData:
    eigenvalues: np.ndarray
    eigvec_matrix: np.ndarray
    eigvec_inverse: np.ndarray
    condition_number: float
    hermitian: bool = False

    def reconstruct(self, values):
        """``V diag(values) V^{-1}``."""
        return (self.eigvec_matrix * values) @ self.eigvec_inverse


def is_hermitian(A, rtol=1e-14):
    A = as_matrix(A)
    return np.allclose(A, A.conj().T, rtol=0, atol=rtol * max(1.0, opnorm(A)))


def spectral_data(A):
    """Eigen-decomposition of ``A`` with the eigenvector condition number.

    Hermitian input takes the unitary path (condition number exactly 1).
    """
    A = as_matrix(A)
    if is_hermitian(A):
        lam, V = np.linalg.eigh(A)
        return SpectralData(lam.astype(complex), V, V.conj().T, 1.0, hermitian=True)
    lam, V = np.linalg.eig(A)
    cond = float(np.linalg.cond(V))
    if not np.isfinite(cond) or cond > 1e15:
        return SpectralData(lam, V, np.full_like(V, np.nan), np.inf)
    return SpectralData(lam, V, np.linalg.inv(V), cond)


def check_spectrum(eigenvalues, tol=SPECTRUM_TOL):
    lam = np.asarray(eigenvalues)
    bad = lam[(np.abs(lam.imag) > tol) | (lam.real < -tol)]
    if bad.size:
        raise NegativeSpectrum(bad, tol)


def _sqrt_spectrum(lam):
    # tiny negative noise is clipped; cos(t sqrt) is branch independent anyway
    lam = np.asarray(lam)
    lam = np.where(np.abs(lam.imag) < SPECTRUM_TOL, lam.real, lam)
    lam = np.where(np.abs(lam) < SPECTRUM_TOL * 1e-4, 0.0, lam)
    return np.sqrt(lam.astype(complex))


def _cos_series(X, t2):
    """Even Taylor series of cos(sqrt(t2 X)) with argument halving."""
    n = X.shape[0]
    I = np.eye(n, dtype=complex)
    norm = opnorm(X) * t2
    j = 0
    while norm > 1.0:
        norm /= 4.0
        j += 1
    Y = X * (t2 / 4.0**j)
    C = I.copy()
    term = I.copy()
    for k in range(1, 20):
        term = term @ (-Y)
        C = C + term / factorial(2 * k)
    for _ in range(j):
        C = 2.0 * C @ C - I
    return C


class CosineProvider:
    """Evaluator ``t -> Cos(t)`` for the cosine family generated by ``-A``.

    The spectral path diagonalises ``A`` once; if the eigenvector
    condition number exceeds ``1e8`` an even power series with
    double-angle scaling is used instead and a ``ReducedAccuracyWarning``
    is emitted.
    """

    def __init__(self, A, sample_grid=None, bound_M=None):
        A = as_matrix(A)
        self.generator = DenseOperator(A)
        self.dim = A.shape[0]
        sd = spectral_data(A)
        check_spectrum(sd.eigenvalues)
        self.spectral = sd if sd.condition_number < COND_LIMIT else None
        self.condition_number = sd.condition_number
        if self.spectral is None:
            warnings.warn(
                f"eigenvector condition {sd.condition_number:.3g} exceeds {COND_LIMIT:g}; "
                "using scaled power series for Cos(t)",
                ReducedAccuracyWarning,
                stacklevel=2,
            )
            self.freqs = None
        else:
            self.freqs = _sqrt_spectrum(sd.eigenvalues).real
            self._uniq, self._inv = np.unique(np.round(self.freqs, 13), return_inverse=True)
        self.sample_grid = (
            np.arange(0.0, 50.0 + 1e-9, 0.01) if sample_grid is None else np.asarray(sample_grid, float)
        )
        self._bound_M = bound_M
        self._lock = threading.Lock()

    @property
    def is_spectral(self):
        return self.spectral is not None

    @property
    def bound_M(self):
        with self._lock:
            if self._bound_M is None:
                self._bound_M = estimate_bound_M(self, self.sample_grid)
            return self._bound_M

    def eval(self, t):
        t = float(t)
        if t == 0.0:
            return np.eye(self.dim, dtype=complex)
        if self.spectral is not None:
            return self.spectral.reconstruct(np.cos(abs(t) * self.freqs))
        return _cos_series(self.generator.entries, t * t)

    __call__ = eval

    def eval_many(self, ts):
        """Stack of ``Cos(t)`` for each ``t`` (shape ``(len(ts), n, n)``)."""
        ts = np.atleast_1d(np.asarray(ts, float))
        if self.spectral is not None:
            V, Vi = self.spectral.eigvec_matrix, self.spectral.eigvec_inverse
            c = np.cos(np.abs(ts)[:, None] * self.freqs[None, :])
            return np.einsum("ij,kj,jl->kil", V, c, Vi, optimize=True)
        return np.stack([self.eval(t) for t in ts])

    def apply_many(self, ts, x):
        """Rows ``Cos(t_k) x`` for a vector ``x`` (shape ``(len(ts), n)``)."""
        ts = np.atleast_1d(np.asarray(ts, float))
        x = np.asarray(x, dtype=complex)
        if self.spectral is not None:
            V, Vi = self.spectral.eigvec_matrix, self.spectral.eigvec_inverse
            y = Vi @ x
            c = np.cos(np.abs(ts)[:, None] * self.freqs[None, :])
            return (c * y[None, :]) @ V.T
        return np.stack([self.eval(t) @ x for t in ts])

    def weighted_sum(self, nodes, weights):
        """``sum_k weights[k] Cos(nodes[k])`` for a discrete measure."""
        nodes = np.asarray(nodes, float)
        weights = np.asarray(weights, complex)
        if nodes.size == 0:
            return np.zeros((self.dim, self.dim), dtype=complex)
        if self.spectral is not None:
            vals = np.zeros(len(self._uniq), dtype=complex)
            for lo in range(0, nodes.size, 1 << 16):
                sl = slice(lo, lo + (1 << 16))
                vals += np.cos(np.outer(self._uniq, np.abs(nodes[sl]))) @ weights[sl]
            return self.spectral.reconstruct(vals[self._inv])
        if nodes.size > 4096:
            return _clenshaw_uniform(self, nodes, weights)
        return np.einsum("k,kij->ij", weights, self.eval_many(nodes))

    def integrate(self, kernel, a, b, points=(), split=None, epsabs=1e-13, epsrel=1e-11):
        """``int_a^b kernel(s) Cos(s) ds`` with an absolute error estimate.

        On the spectral path each distinct frequency is integrated
        adaptively; infinite ``b`` is supported there. The fallback path
        uses graded Gauss-Legendre panels on a finite interval.
        """
        if self.spectral is not None:
            vals, err = _quad.modal_cos_integral(
                kernel, self._uniq, a, b, points=points, split=split, epsabs=epsabs, epsrel=epsrel
            )
            return self.spectral.reconstruct(vals[self._inv]), err * max(1.0, self.condition_number)
        if np.isinf(b):
            raise TailNotConverged("fallback cosine path needs a finite integration range")
        w_max = np.sqrt(max(opnorm(self.generator.entries), 1e-300))
        panel = min(0.5, np.pi / (2 * w_max))
        width = max(panel / 1024, 1e-6)
        nodes, weights = _quad.gl_graded(min(a, b), max(a, b), points, panel, width)
        if b < a:
            weights = -weights
        kv = np.array([kernel(s) for s in nodes], dtype=complex)
        return self.weighted_sum(nodes, kv * weights), 1e-10


def _clenshaw_uniform(P, nodes, weights):
    """Weighted sum over a uniform grid through the d'Alembert recurrence."""
    order = np.argsort(np.abs(nodes))
    s = np.abs(nodes[order])
    w = weights[order]
    tol = 1e-9 * max(1.0, s.max())
    gaps = np.diff(s)
    gaps = gaps[gaps > tol]
    step = gaps.min() if gaps.size else 1.0
    idx = np.rint(s / step).astype(np.int64)
    if idx.max() > 4 * s.size or not np.allclose(idx * step, s, atol=tol):
        return np.einsum("k,kij->ij", weights, P.eval_many(nodes))
    coef = np.zeros(idx.max() + 1, dtype=complex)
    np.add.at(coef, idx, w)
    n = P.dim
    I = np.eye(n, dtype=complex)
    C1 = P.eval(step)
    # Clenshaw for sum c_k T_k(C1) with T_k(C1) = Cos(k step)
    b1 = np.zeros((n, n), dtype=complex)
    b2 = np.zeros((n, n), dtype=complex)
    for k in range(coef.size - 1, 0, -1):
        b1, b2 = coef[k] * I + 2.0 * C1 @ b1 - b2, b1
    return coef[0] * I + C1 @ b1 - b2


def make_cosine(A, sample_grid=None):
    """Build the cosine family generated by ``-A``.

    Raises ``NegativeSpectrum`` if ``A`` has eigenvalues off ``[0, inf)``.
    """
    return CosineProvider(A, sample_grid=sample_grid)


def estimate_bound_M(P, grid=None, refine=5):
    """Estimate ``sup_t ||Cos(t)||`` on a grid, refined around local maxima.

    Evenness of the family means only ``t >= 0`` is sampled. The result is
    clamped below at 1 since ``Cos(0) = I``.
    """
    ts = np.abs(np.asarray(P.sample_grid if grid is None else grid, float))
    ts = np.unique(ts)
    norms = np.empty(ts.size)
    for lo in range(0, ts.size, 512):
        sl = slice(lo, lo + 512)
        norms[sl] = np.linalg.norm(P.eval_many(ts[sl]), 2, axis=(1, 2))
    best = float(norms.max())
    if ts.size > 2 and refine:
        h = np.min(np.diff(ts))
        interior = np.where((norms[1:-1] >= norms[:-2]) & (norms[1:-1] >= norms[2:]))[0] + 1
        top = interior[np.argsort(norms[interior])[::-1][:refine]]
        for k in top:
            res = optimize.minimize_scalar(
                lambda t: -opnorm(P.eval(t)),
                bounds=(ts[k] - h, ts[k] + h),
                method="bounded",
                options={"xatol": 1e-10},
            )
            best = max(best, -float(res.fun))
    return max(1.0, best)


def dalembert_residual(P, t, s):
    """``||Cos(t+s) + Cos(t-s) - 2 Cos(t) Cos(s)||``."""
    C = P.eval_many([t + s, t - s, t, s])
    return opnorm(C[0] + C[1] - 2.0 * C[2] @ C[3])


def resolvent(A, lam):
    """``(lam - A)^{-1}``; raises ``SpectrumHit`` within 1e-12 of the spectrum."""
    A = as_matrix(A)
    lam = complex(lam)
    ev = np.linalg.eigvals(A)
    if np.min(np.abs(ev - lam)) <= 1e-12:
        raise SpectrumHit(f"lambda={lam} lies on the spectrum")
    n = A.shape[0]
    return np.linalg.solve(lam * np.eye(n) - A, np.eye(n, dtype=complex))


def laplace_recover(P, lam, T_max=400.0, tail_tol=1e-10):
    """Recover ``lam (lam^2 + A)^{-1}`` from ``int_0^inf e^{-lam t} Cos(t) dt``.

    The integral is truncated at ``T`` with the analytic bound
    ``M e^{-Re(lam) T} / Re(lam) <= tail_tol``.

    Returns
    -------
    value : ndarray
    err : float
        Quadrature error estimate plus the tail bound.
    """
    lam = complex(lam)
    a = lam.real
    if a <= 0:
        raise ValueError("laplace_recover needs Re(lam) > 0")
    if a * T_max < 30:
        raise TailNotConverged(f"Re(lam)*T_max = {a * T_max:.3g} < 30")
    M = P.bound_M
    T = max(np.log(M / (a * tail_tol)) / a, 1.0)
    if T > T_max:
        raise TailNotConverged(f"needed T={T:.3g} beyond T_max={T_max:g}")
    val, err = P.integrate(lambda t: np.exp(-lam * t), 0.0, T)
    return val, err + M * np.exp(-a * T) / a


def sectoriality_residual(A, M, lam_samples):
    """Largest excess of ``||R(lam^2, A)|| |lam| |Im lam| / M`` over 1, clamped at 0."""
    A = as_matrix(A)
    worst = 0.0
    for lam in lam_samples:
        lam = complex(lam)
        if lam.imag == 0:
            raise ValueError("samples must lie off the real axis")
        r = opnorm(resolvent(A, lam * lam)) * abs(lam) * abs(lam.imag) / M - 1.0
        worst = max(worst, r)
    return worst


def spectral_apply(f, A, on="sqrt"):
    """Oracle ``V diag(f(.)) V^{-1}``.

    ``on="sqrt"`` applies ``f`` to the principal square roots of the
    eigenvalues (the comparison point for functions of ``B``); ``on="direct"``
    applies it to the eigenvalues themselves. Error amplification is bounded
    by the eigenvector condition number.
    """
    sd = A if isinstance(A, SpectralData) else spectral_data(A)
    if not np.isfinite(sd.condition_number) or sd.condition_number > COND_LIMIT:
        raise NonDiagonalizable(f"condition number {sd.condition_number:.3g}")
    x = _sqrt_spectrum(sd.eigenvalues) if on == "sqrt" else sd.eigenvalues
    if np.all(np.abs(x.imag) <= 1e-10 * (1.0 + np.abs(x.real))):
        x = x.real
    vals = np.array([f(v) for v in x], dtype=complex)
    return sd.reconstruct(vals)


def sqrt_oracle(A):
    """Principal square root of ``A`` through its eigen-decomposition."""
    return spectral_apply(lambda z: z, A, on="sqrt")
