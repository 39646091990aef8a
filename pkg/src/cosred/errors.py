"""Exception and warning classes raised across the package."""


class CosredError(Exception):
    """Base class for all package errors."""


class NegativeSpectrum(CosredError):
    """Generator has spectrum off [0, inf); its cosine family is unbounded."""

    def __init__(self, eigenvalues, tol):
        self.eigenvalues = list(eigenvalues)
        super().__init__(
            f"eigenvalues outside [0, inf) (tol {tol:g}): "
            + ", ".join(f"{complex(z):.6g}" for z in self.eigenvalues)
        )


class NonDiagonalizable(CosredError):
    pass


class SpectrumHit(CosredError):
    pass


class SpectrumTooClose(CosredError):
    pass


class SpectrumInvalid(CosredError):
    pass


class TailNotConverged(CosredError):
    pass


class TailUnresolved(CosredError):
    pass


class NotH1(CosredError):
    pass


class NotRegularizable(CosredError):
    pass


class HypothesisViolated(CosredError):
    pass


class KernelPeakUnresolved(CosredError):
    pass


class NoConvergence(CosredError):
    pass


class OscillationUnresolved(CosredError):
    pass


class SupportOverflow(CosredError):
    pass


class GridTooCoarse(CosredError):
    pass


class BoundaryLeakage(CosredError):
    pass


class ContourTooClose(CosredError):
    pass


class ConfigError(CosredError):
    pass


class ReducedAccuracyWarning(UserWarning):
    """A fallback path with weaker error control was taken."""


class GridMismatchWarning(UserWarning):
    """Grids were not commensurable and samples were resampled."""


class BoundViolationWarning(UserWarning):
    """A norm bound that should hold by theory was exceeded numerically."""
