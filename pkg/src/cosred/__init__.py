"""Cosine operator functions, the Phillips calculus and the square-root reduction group on matrices."""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .families import generate_family
from .measures import (
    RealMeasure,
    FunctionOnLine,
    bernstein_inverse,
    convolve,
    cosine_transform,
    even_part,
    fourier_transform,
    tv_norm,
)
from .operator_core import (
    CosineProvider,
    dalembert_residual,
    estimate_bound_M,
    laplace_recover,
    make_cosine,
    spectral_apply,
    sqrt_oracle,
)
from .phillips import CalcContext, apply_measure, define_B, phi, resolvent_B
from .reduction import T_B_poisson, U_boundary, U_euler, bound_scan, pv_truncated
from .sector import compat_residual, contour_psi, sqrt_identification
from .transference import conv_norm, factorization_residual, hilbert_transform, transference_check
