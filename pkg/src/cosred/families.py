"""Example generator families with spectrum in ``[0, inf)``."""
import numpy as np

from .errors import SpectrumInvalid
from .operator_core import CosineProvider


def _check(spectrum):
    spectrum = np.asarray(spectrum, float)
    if spectrum.size == 0 or np.any(spectrum < 0) or not np.all(np.isfinite(spectrum)):
        raise SpectrumInvalid(f"spectrum must be finite and nonnegative, got {spectrum.tolist()}")
    return spectrum


def scalar(a):
    return np.array([[float(_check([a])[0])]], dtype=complex)


def diagonal(spectrum):
    return np.diag(_check(spectrum)).astype(complex)


def similarity_matrix(dim, cond, seed=0):
    """``S = Q1 diag(sigma) Q2`` with geometric singular values, so ``cond(S) = cond`` exactly."""
    rng = np.random.default_rng(seed)
    q1, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    q2, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    sigma = np.geomspace(1.0, 1.0 / cond, dim) if dim > 1 else np.ones(1)
    return q1 @ np.diag(sigma) @ q2


def similarity(spectrum, cond, seed=0):
    """``S diag(spectrum) S^{-1}`` with ``cond(S) = cond``."""
    spectrum = _check(spectrum)
    if cond < 1:
        raise SpectrumInvalid("condition target must be at least 1")
    S = similarity_matrix(spectrum.size, cond, seed)
    return (S @ np.diag(spectrum) @ np.linalg.inv(S)).astype(complex)


def laplacian_1d(dim, spacing=1.0):
    """Periodic second difference ``-(u_{k+1} - 2u_k + u_{k-1}) / h^2`` (positive semidefinite)."""
    if dim < 1:
        raise SpectrumInvalid("dimension must be positive")
    if dim == 1:
        return np.zeros((1, 1), dtype=complex)
    L = 2.0 * np.eye(dim)
    idx = np.arange(dim)
    L[idx, (idx + 1) % dim] -= 1.0
    L[idx, (idx - 1) % dim] -= 1.0
    return (L / spacing**2).astype(complex)


def from_spec(spec):
    """Build the matrix from a family description.

    ``{"kind": "scalar", "a": 4}``, ``{"kind": "diagonal", "spectrum": [...]}``,
    ``{"kind": "similarity", "spectrum": [...], "cond": 10, "seed": 0}``,
    ``{"kind": "laplacian_1d", "dim": 64}``.
    """
    kind = spec.get("kind")
    if kind == "scalar":
        return scalar(spec["a"])
    if kind == "diagonal":
        return diagonal(spec["spectrum"])
    if kind == "similarity":
        return similarity(spec["spectrum"], spec["cond"], spec.get("seed", 0))
    if kind == "laplacian_1d":
        return laplacian_1d(spec["dim"], spec.get("spacing", 1.0))
    raise ValueError(f"unknown family kind {kind!r}")


def generate_family(spec):
    """Matrix and cosine provider for a family description."""
    A = from_spec(spec)
    return A, CosineProvider(A)


SHIPPED = {
    "scalar(4)": {"kind": "scalar", "a": 4.0},
    "diagonal([0,1,4])": {"kind": "diagonal", "spectrum": [0.0, 1.0, 4.0]},
    "similarity([1,4],10)": {"kind": "similarity", "spectrum": [1.0, 4.0], "cond": 10.0, "seed": 0},
    "laplacian_1d(64)": {"kind": "laplacian_1d", "dim": 64},
}
