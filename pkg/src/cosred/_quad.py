"""Quadrature kernels shared by the calculus modules.

Two families live here: fixed composite Gauss-Legendre panels for
matrix-valued integrands, and mode-wise adaptive integration of
``k(s) cos(w s)`` used when the cosine family is available in
diagonal form.
"""
import warnings
from functools import lru_cache

import numpy as np
from scipy import integrate


@lru_cache(maxsize=32)
def _gl(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def gl_panels(a, b, panel, order=16):
    """Nodes and weights of composite Gauss-Legendre on [a, b].

    ``panel`` is the maximal panel length; the panel count is rounded up.
    """
    if b == a:
        return np.zeros(0), np.zeros(0)
    npan = max(1, int(np.ceil(abs(b - a) / panel)))
    edges = np.linspace(a, b, npan + 1)
    x, w = _gl(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def gl_graded(a, b, points, panel, width, order=16):
    """Composite Gauss-Legendre on [a, b] with geometric refinement at ``points``.

    Around each point ``p`` panels shrink geometrically down to ``width``,
    which resolves kernels peaked at ``p`` with half-width ``width``.
    """
    cuts = {a, b}
    for p in points:
        if not a < p < b:
            continue
        h = width
        while h < panel:
            for q in (p - h, p + h):
                if a < q < b:
                    cuts.add(q)
            h *= 2.0
        cuts.add(p)
    cuts = np.array(sorted(cuts))
    nodes, weights = [], []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        x, w = gl_panels(lo, hi, panel, order)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def _finite_modal(kernel, freqs, a, b, points, epsabs, epsrel):
    freqs = np.asarray(freqs, dtype=float)

    def f(s):
        v = kernel(s) * np.cos(freqs * s)
        return np.concatenate([v.real, v.imag])

    inner = sorted(p for p in points if a < p < b)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad_vec(
            f, a, b, epsabs=epsabs, epsrel=epsrel, points=inner or None, limit=20000
        )
    m = len(freqs)
    return val[:m] + 1j * val[m:], float(err)


def _tail_modal(kernel, freqs, start, epsabs):
    out = np.zeros(len(freqs), dtype=complex)
    err = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for i, w in enumerate(freqs):
            parts = []
            for part in (lambda s: kernel(s).real, lambda s: kernel(s).imag):
                if w == 0.0:
                    v, e = integrate.quad(part, start, np.inf, epsabs=epsabs, limit=500)
                else:
                    v, e = integrate.quad(
                        part, start, np.inf, weight="cos", wvar=w, epsabs=epsabs, limlst=200
                    )
                parts.append(v)
                err += e
            out[i] = parts[0] + 1j * parts[1]
    return out, err


def modal_cos_integral(kernel, freqs, a, b, points=(), split=None, epsabs=1e-13, epsrel=1e-11):
    """Integrate ``kernel(s) * cos(w s)`` over [a, b] for every ``w`` in ``freqs``.

    ``kernel`` maps a float to a complex number. An infinite upper limit is
    handled by adaptive quadrature up to ``split`` followed by a Fourier
    (QAWF) tail integral per frequency.

    Returns the complex integrals and a summed absolute error estimate.
    """
    freqs = np.asarray(freqs, dtype=float)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    if np.isinf(b):
        if split is None:
            split = a + 10.0
        split = max(split, a)
        head, e1 = _finite_modal(kernel, freqs, a, split, points, epsabs, epsrel)
        tail, e2 = _tail_modal(kernel, freqs, split, epsabs)
        return sign * (head + tail), e1 + e2
    val, err = _finite_modal(kernel, freqs, a, b, points, epsabs, epsrel)
    return sign * val, err
