import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from cosred import families, measures
from cosred import transference as T
from cosred.errors import BoundaryLeakage, GridMismatchWarning, GridTooCoarse, SupportOverflow
from cosred.measures import delta, symmetric_atoms, two_sided_exponential
from cosred.phillips import CalcContext, apply_measure

STEP = 1e-2


def grid(fn, half=20.0, step=STEP, p=2.0):
    return T.VectorGridFunction.sample(fn, -half, half, step, p)


def bump(t):
    return np.exp(-(t**2))


@pytest.fixture(scope="module")
def zero():
    return CalcContext.from_matrix([[0.0]])


@pytest.fixture(scope="module")
def scalar4():
    return CalcContext.from_matrix([[4.0]])


def test_convolve_examples():
    f = grid(bump)
    g = T.convolve_op(delta(0.0), f)
    assert np.array_equal(g.samples, f.samples) and g.left == f.left
    g = T.convolve_op(delta(0.5), f)
    assert np.allclose(g.samples[:, 0], bump(g.nodes - 0.5), atol=1e-14)
    w = 3.0
    f = grid(lambda t: np.cos(w * t))
    g = T.convolve_op(symmetric_atoms([1.0], [1.0]), f)
    inner = slice(200, -200)
    assert np.allclose(g.samples[inner, 0], np.cos(w) * np.cos(w * g.nodes[inner]), atol=1e-12)


def test_convolve_density_matches_closed_form():
    # variances add: e^{-t^2} * e^{-s^2/4}/(2 sqrt(pi)) = e^{-t^2/5}/sqrt(5)
    mu = measures.gaussian_density(step=STEP)
    with warnings.catch_warnings():
        warnings.simplefilter("error", GridMismatchWarning)
        g = T.convolve_op(mu, grid(bump))
    assert np.abs(g.samples[:, 0] - np.exp(-(g.nodes**2) / 5) / np.sqrt(5)).max() < 1e-12


def test_convolve_overflow_and_mismatch():
    f = grid(lambda t: np.ones_like(t), half=1.0)
    with pytest.raises(SupportOverflow):
        T.convolve_op(delta(0.5), f, extend=False)
    with pytest.warns(GridMismatchWarning):
        T.convolve_op(delta(0.005), grid(bump))
    with pytest.raises(ValueError):
        T.convolve_op(measures.poisson(1.0), f)


@given(
    st.lists(st.integers(-300, 300), min_size=1, max_size=5),
    st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False), min_size=5, max_size=5),
    st.sampled_from([1.0, 1.5, 2.0, 4.0]),
)
def test_young_inequality(locs, weights, p):
    mu = measures.RealMeasure(np.array(locs) * STEP, weights[: len(locs)])
    f = grid(lambda t: np.exp(-np.abs(t)) * np.cos(t), p=p)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        g = T.convolve_op(mu, f)
    assert g.norm() <= measures.tv_norm(mu) * f.norm() * (1 + 1e-9) + 1e-300


def test_iota_norms(zero, scalar4):
    f = T.iota_n(zero.provider, [2.0], 1.5, 0.5, 1e-3)
    assert abs(f.norm() - 4.0**0.5 * 2.0) < 1e-12
    f = T.iota_n(scalar4.provider, [1.0], 1.0, 1.0, 1e-3)
    assert abs(f.norm() ** 2 - (2 + np.sin(8) / 4)) < 1e-6
    with pytest.raises(GridTooCoarse):
        T.iota_n(scalar4.provider, [1.0], 1.0, 1.0005, 1e-3)


def test_iota_bound(family):
    _, ctx = family
    rng = np.random.default_rng(0)
    x = rng.standard_normal(ctx.dim)
    f = T.iota_n(ctx.provider, x, 2.0, 1.0, 1e-2)
    assert f.norm() <= f.meta["bound"] * (1 + 1e-9)


def test_iota_bound_attained_hermitian():
    # a zero eigenvalue makes Cos(s) x = x for x in the kernel
    ctx = CalcContext.from_matrix(np.diag([0.0, 1.0, 4.0]))
    f = T.iota_n(ctx.provider, [1.0, 0.0, 0.0], 2.0, 1.0, 1e-3)
    assert abs(f.norm() / f.meta["bound"] - 1.0) < 1e-3


def test_P_n_examples(zero, scalar4):
    f = T.VectorGridFunction.sample(lambda t: np.full_like(t, 3.0), -4.0, 4.0, 1e-3)
    assert abs(T.P_n_apply(zero.provider, f, 4.0)[0] - 3.0) < 1e-12
    P = scalar4.provider
    f = T.VectorGridFunction(-4.0, 1e-3, P.apply_many(-4.0 + (np.arange(8000) + 0.5) * 1e-3, np.array([1.0])))
    assert abs(T.P_n_apply(P, f, 4.0)[0] - 1.0) < 1e-6
    f = T.VectorGridFunction(-4.0, 1e-3, np.zeros((8000, 1)))
    assert np.all(T.P_n_apply(P, f, 4.0) == 0)
    with pytest.raises(GridTooCoarse):
        T.P_n_apply(P, f, 5.0)


def test_P_n_norm_bound(family):
    _, ctx = family
    rng = np.random.default_rng(1)
    P, n = ctx.provider, 4.0
    for _ in range(5):
        amp = rng.standard_normal(ctx.dim)
        f = T.VectorGridFunction.sample(lambda t: np.exp(-(t**2) / rng.uniform(0.5, 8))[:, None] * amp, -n, n, 1e-2)
        assert np.linalg.norm(T.P_n_apply(P, f, n)) <= 5 * P.bound_M * (2 * n) ** -0.5 * f.norm() * (1 + 1e-9)


def test_factorization_examples(zero, scalar4):
    assert T.factorization_residual(zero, delta(0.0), 4.0, 1.0, 1e-3) < 1e-10
    assert T.factorization_residual(scalar4, symmetric_atoms([1.0], [1.0]), 4.0, 1.0, 1e-3) < 1e-6
    ctx = CalcContext.from_matrix(families.similarity([1.0, 4.0], 10.0))
    mu = measures.random_even_measure(np.random.default_rng(5), "atomic", support=1.0, step=1e-3)
    assert T.factorization_residual(ctx, mu, 8.0, 1.0, 1e-3) < 1e-5


def test_factorization_converges_with_step(scalar4):
    # midpoint rule: halving the step quarters the residual
    mu = symmetric_atoms([1.0], [1.0])
    r1 = T.factorization_residual(scalar4, mu, 4.0, 1.0, 2e-3)
    r2 = T.factorization_residual(scalar4, mu, 4.0, 1.0, 1e-3)
    assert 3.5 < r1 / r2 < 4.5


def test_factorization_probes(scalar4):
    mu = symmetric_atoms([0.5], [1.0])
    r = T.factorization_residual(scalar4, mu, 4.0, 1.0, 1e-3, probes=[[1.0], [2j]], relative=False)
    assert r < 1e-6
    with pytest.raises(ValueError):
        T.factorization_residual(scalar4, symmetric_atoms([2.0], [1.0]), 4.0, 1.0)


def test_conv_norm_examples():
    for p in (1.0, 2.0, 3.0):
        assert abs(T.conv_norm(delta(0.7), p).value - 1.0) < 1e-9
    assert abs(T.conv_norm(symmetric_atoms([1.0], [1.0])).exact - 1.0) < 1e-12
    for lam in (0.5, 1.0, 3.0):
        # midpoint sampling of the density carries an O(step^2) mass error
        assert abs(T.conv_norm(two_sided_exponential(lam)).exact - 1 / lam) < 1e-6


def test_conv_norm_lower_bounds():
    rng = np.random.default_rng(2)
    for kind in ("atomic", "mixed"):
        mu = measures.random_even_measure(rng, kind, support=1.0, step=1e-2)
        tv = measures.tv_norm(mu)
        exact = T.conv_norm(mu).exact
        for method, p in (("probe", 1.5), ("probe", 3.0), ("power_iteration", 2.0)):
            est = T.conv_norm(mu, p, method=method)
            assert est.exact is None and 0 <= est.lower_bound <= tv * (1 + 1e-12)
            if p == 2.0:
                assert est.lower_bound <= exact * (1 + 1e-6)
    with pytest.raises(ValueError):
        T.conv_norm(delta(0.0), 3.0, method="supnorm_exact")


def test_transference_examples(zero):
    ctx = CalcContext.from_matrix(np.diag([1.0, 4.0]))
    rep = T.transference_check(ctx, symmetric_atoms([1.0], [1.0]))
    assert rep.supremum <= 1.0 + 1e-12 and rep.comparison == pytest.approx(5.0) and rep.satisfied
    mu = measures.random_even_measure(np.random.default_rng(9), "mixed", support=1.0, step=1e-3)
    rep = T.transference_check(zero, mu)
    assert rep.supremum == pytest.approx(abs(measures.cosine_transform(mu).eval(np.array([0.0]))[0]))
    assert rep.satisfied
    with pytest.raises(ValueError):
        T.transference_check(zero, delta(1.0))


@pytest.mark.parametrize("cond", [2.0, 10.0, 50.0])
def test_transference_slack(cond):
    ctx = CalcContext.from_matrix(families.similarity([1.0, 4.0], cond))
    rng = np.random.default_rng(int(cond))
    for kind in ("atomic", "density", "mixed"):
        rep = T.transference_check(ctx, measures.random_even_measure(rng, kind, support=1.0, step=1e-3), pairs=((2.0, 1.0), (64.0, 1.0)))
        assert rep.satisfied and rep.meta["certified"] and rep.meta["slack"] > 0
        refined = [b for _, _, b in rep.meta["refined"]]
        assert refined[0] > refined[1] > rep.comparison


def test_hilbert_examples():
    w = 2.0
    win = lambda t: np.exp(-((t / 30) ** 8))
    f = grid(lambda t: np.cos(w * t) * win(t), half=100.0, step=0.01)
    h = T.hilbert_transform(f)
    inner = np.abs(f.nodes) < 20
    assert np.abs(h.samples[inner, 0] - np.sin(w * f.nodes[inner]) * win(f.nodes[inner])).max() < 1e-6
    z = T.hilbert_transform(grid(np.zeros_like))
    assert np.all(z.samples == 0)
    L = 2.0**14
    f = T.VectorGridFunction.sample(lambda t: 1 / (np.pi * (1 + t * t)), -L, L, 0.05)
    t = f.nodes
    near = np.abs(t) < 50
    for method in ("fft", "kernel"):
        h = T.hilbert_transform(f, method)
        assert np.abs(h.samples[near, 0] - t[near] / (np.pi * (1 + t[near] ** 2))).max() < 1e-6


def test_hilbert_paths_agree_and_isometry():
    probes = [lambda t: t * np.exp(-(t**2)), lambda t: np.sin(3 * t) * np.exp(-(t**2) / 4), lambda t: np.exp(-((t - 1) ** 2)) - np.exp(-((t + 1) ** 2))]
    for fn in probes:
        f = grid(fn, half=40.0, step=0.01)
        a, b = T.hilbert_transform(f, "fft"), T.hilbert_transform(f, "kernel")
        assert np.abs(a.samples - b.samples).max() < 1e-4
        assert abs(T.l2_isometry_ratio(f) - 1) < 1e-3


def test_hilbert_boundary_leakage():
    with pytest.raises(BoundaryLeakage):
        T.hilbert_transform(grid(lambda t: np.exp(-np.abs(t) / 10)))
    with pytest.raises(ValueError):
        T.hilbert_transform(grid(bump), "other")


def test_multiplier_decomposition():
    t = np.linspace(-20, 20, 4001)
    assert T.multiplier_decomposition_residual(2.0, t) < 1e-15
    assert T.multiplier_decomposition_residual(1 + 1j, t) < 1e-14
    assert T.multiplier_decomposition_residual(0.01 + 10j, t) < 1e-13
    with pytest.raises(ValueError):
        T.multiplier_decomposition_residual(1j, t)


def test_multiplier_invariance():
    a, b = T.multiplier_invariance_check(lambda t: np.exp(-np.abs(t)), beta=2.0)
    assert a.value == pytest.approx(1.0) and b.value == pytest.approx(1.0)
    a, b = T.multiplier_invariance_check(np.cos, alpha=3.0)
    assert abs(a.value - 1) < 1e-9 and abs(b.value - a.value) < 1e-6
    lam = 2.0
    a, b = T.multiplier_invariance_check(lambda t: lam / (lam**2 + t**2), gamma=1.0)
    assert abs(a.value - 1 / lam) < 1e-9 and abs(b.value - a.value) < 1e-6 * a.value
    with pytest.raises(ValueError):
        T.multiplier_invariance_check(np.cos, beta=0.0)


def test_binary_roundtrip():
    rng = np.random.default_rng(4)
    f = T.VectorGridFunction(-1.25, 0.125, rng.standard_normal((20, 3)) + 1j * rng.standard_normal((20, 3)), 1.5)
    buf = f.to_bytes()
    assert len(buf) == 8 + 8 + 8 + 4 + 8 + 20 * 3 * 16
    g = T.VectorGridFunction.from_bytes(buf)
    assert (g.left, g.step, g.p) == (f.left, f.step, f.p) and np.array_equal(g.samples, f.samples)


def test_grid_function_validation():
    with pytest.raises(ValueError):
        T.VectorGridFunction(0.0, 0.0, np.zeros(3))
    with pytest.raises(ValueError):
        T.VectorGridFunction(0.0, 1.0, np.zeros(3), p=0.5)
    with pytest.raises(GridTooCoarse):
        T.VectorGridFunction.sample(bump, 0.0, 1.0, 0.3)


def test_tv_continuity(family):
    _, ctx = family
    mu = measures.random_even_measure(np.random.default_rng(6), "mixed", support=2.0, step=1e-2)
    ks = [0.5, 1.0, 1.5, 2.0]
    d = [v for _, v in T.tv_continuity(ctx, mu, ks)]
    assert d[-1] < 1e-12
    for k, v in zip(ks, d):
        rest = measures.tv_norm(mu) - measures.tv_norm(T.truncate(mu, k))
        assert v <= ctx.M * rest * (1 + 1e-6) + 1e-12


def test_truncate_total_variation():
    mu = two_sided_exponential(1.0)
    for k in (1.0, 3.0):
        tv = measures.tv_norm(T.truncate(mu, k))
        assert abs(tv - (1 - np.exp(-k))) < 1e-3
