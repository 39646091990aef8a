"""Shipped functions on the line, each with a structural cache key."""
import numpy as np

from .measures import FunctionOnLine


def poisson_symbol(lam):
    """``lam / (lam^2 + t^2)``."""
    lam = complex(lam) if np.iscomplexobj(lam) else float(lam)
    return FunctionOnLine(
        lambda t: lam / (lam * lam + np.asarray(t, float) ** 2),
        lambda t: -2 * lam * np.asarray(t, float) / (lam * lam + np.asarray(t, float) ** 2) ** 2,
        even=True,
        decay_hint="integrable",
        key=("poisson_symbol", lam),
    )


def exp_abs(lam):
    """``e^{-lam |t|}`` for ``Re lam >= 0``."""
    lam = complex(lam)

    def ev(t):
        return np.exp(-lam * np.abs(np.asarray(t, float)))

    def dv(t):
        t = np.asarray(t, float)
        return -lam * np.sign(t) * np.exp(-lam * np.abs(t))

    hint = "integrable" if lam.real > 0 else "bounded"
    return FunctionOnLine(ev, dv, even=True, decay_hint=hint, key=("exp_abs", lam))


def regularizer(n):
    """``(1 + t^2)^{-n}``."""
    return FunctionOnLine(
        lambda t: (1.0 + np.asarray(t, float) ** 2) ** (-n),
        lambda t: -2.0 * n * np.asarray(t, float) * (1.0 + np.asarray(t, float) ** 2) ** (-n - 1),
        even=True,
        decay_hint="integrable",
        key=("regularizer", n),
    )


def abs_t():
    """``|t|``."""
    return FunctionOnLine(
        lambda t: np.abs(np.asarray(t, float)).astype(complex),
        lambda t: np.sign(np.asarray(t, float)).astype(complex),
        even=True,
        decay_hint=("polynomial", 1),
        key=("abs",),
    )


def constant(c=1.0):
    return FunctionOnLine(
        lambda t: np.full(np.shape(t), complex(c)),
        lambda t: np.zeros(np.shape(t), dtype=complex),
        even=True,
        decay_hint="bounded",
        key=("const", complex(c)),
    )


def resolvent_symbol(lam):
    """``1 / (lam - |t|)`` for ``lam`` off ``[0, inf)``."""
    lam = complex(lam)

    def ev(t):
        return 1.0 / (lam - np.abs(np.asarray(t, float)))

    def dv(t):
        t = np.asarray(t, float)
        return np.sign(t) / (lam - np.abs(t)) ** 2

    return FunctionOnLine(ev, dv, even=True, decay_hint="bounded", key=("resolvent", lam))


def product(f, g):
    """Pointwise product, keyed structurally when both factors are keyed."""
    key = None if f.key is None or g.key is None else ("product",) + tuple(sorted((f.key, g.key), key=repr))

    def ev(t):
        return f.eval(t) * g.eval(t)

    dv = None
    if f.deriv is not None and g.deriv is not None:

        def dv(t):
            return f.deriv(t) * g.eval(t) + f.eval(t) * g.deriv(t)

    hint = _product_hint(f.decay_hint, g.decay_hint)
    return FunctionOnLine(ev, dv, even=f.even and g.even, decay_hint=hint, key=key)


def _degree(hint):
    if hint == "integrable":
        return -1
    if hint == "bounded":
        return 0
    return hint[1]


def _product_hint(a, b):
    d = _degree(a) + _degree(b)
    if d < 0:
        return "integrable"
    if d == 0:
        return "bounded"
    return ("polynomial", d)
