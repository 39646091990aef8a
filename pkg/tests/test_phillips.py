import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from cosred import measures, symbols
from cosred.errors import HypothesisViolated, NotRegularizable, SpectrumTooClose
from cosred.measures import FunctionOnLine, delta, symmetric_atoms, two_sided_exponential
from cosred.phillips import (
    CalcContext,
    apply_measure,
    convergence_lemma_check,
    define_B,
    homomorphism_residual,
    measure_norm_ok,
    multiplicativity_residual,
    phi,
    regularizer_independence,
    regularizer_power,
    resolvent_B,
)

S = np.array([[1.0, 1.0], [0.0, 1.0]])
NONNORMAL = S @ np.diag([1.0, 4.0]) @ np.linalg.inv(S)
SHIPPED_F = [symbols.poisson_symbol(1.5), symbols.exp_abs(0.7), symbols.regularizer(2)]


@pytest.fixture(scope="module")
def scalar4():
    return CalcContext.from_matrix([[4.0]])


@pytest.fixture(scope="module")
def diag14():
    return CalcContext.from_matrix(np.diag([1.0, 4.0]))


def test_apply_measure_examples(scalar4, diag14):
    assert np.allclose(apply_measure(diag14, delta(0.0)), np.eye(2))
    assert np.allclose(apply_measure(diag14, symmetric_atoms([0.8], [1.0])), diag14.provider.eval(0.8))
    val = apply_measure(scalar4, two_sided_exponential(1.0))[0, 0]
    # lattice midpoint sum of a kinked density: O(h^2) = 1e-6 / 12 scale
    assert abs(val - 0.2) < 1e-6


def test_apply_measure_tail_and_kernel(scalar4):
    # mu_c with negative atom: C(mu_c)(t) = |t| F(ct) with F(t) = Si(|t|) - pi/2
    from cosred.reduction import mu_c

    c = 0.5
    val = apply_measure(scalar4, mu_c(c, atom_sign=-1.0))[0, 0]
    assert abs(val - 2 * (oracles.Si(2 * c) - np.pi / 2)) < 1e-9
    val = apply_measure(scalar4, measures.poisson(1.0))[0, 0]
    assert abs(val - np.exp(-2.0)) < 1e-10


def test_homomorphism_examples(scalar4):
    assert homomorphism_residual(scalar4, delta(0.0), delta(0.0)) == 0.0
    mu, nu = symmetric_atoms([1.0], [1.0]), symmetric_atoms([2.0], [1.0])
    assert homomorphism_residual(scalar4, mu, nu) < 1e-10


def test_homomorphism_nonnormal_densities():
    ctx = CalcContext.from_matrix(NONNORMAL)
    rng = np.random.default_rng(4)
    for _ in range(3):
        mu = measures.random_even_measure(rng, "density")
        nu = measures.random_even_measure(rng, "mixed")
        assert homomorphism_residual(ctx, mu, nu) < 1e-6


@given(st.lists(st.integers(0, 3000), min_size=1, max_size=4), st.lists(st.integers(0, 3000), min_size=1, max_size=4))
def test_homomorphism_property(ka, kb):
    ctx = _nonnormal()
    mu = symmetric_atoms(np.array(ka) * 1e-3, np.ones(len(ka)))
    nu = symmetric_atoms(np.array(kb) * 1e-3, 1j * np.ones(len(kb)))
    assert homomorphism_residual(ctx, mu, nu) < 1e-9


_NN = {}


def _nonnormal():
    if "ctx" not in _NN:
        _NN["ctx"] = CalcContext.from_matrix(NONNORMAL)
    return _NN["ctx"]


def test_phi_examples(diag14, scalar4):
    lam = 1.5
    ref = lam * np.linalg.inv(lam * lam * np.eye(2) + diag14.A)
    assert oracles.norm(phi(diag14, symbols.poisson_symbol(lam)) - ref) < 1e-8
    assert oracles.norm(phi(diag14, symbols.constant(1.0)) - np.eye(2)) < 1e-8
    assert oracles.norm(phi(diag14, symbols.abs_t()) - np.diag([1.0, 2.0])) < 1e-8
    assert abs(define_B(scalar4)[0, 0] - 2.0) < 1e-10
    assert oracles.norm(define_B(CalcContext.from_matrix([[0.0]]))) < 1e-12


def test_B_similarity_covariance():
    ctx = _nonnormal()
    ref = S @ np.diag([1.0, 2.0]) @ np.linalg.inv(S)
    assert oracles.norm(define_B(ctx) - ref) < 1e-8


def test_phi_oracle_agreement(family):
    name, ctx = family
    cond = ctx.provider.condition_number
    for f in SHIPPED_F + [symbols.abs_t()]:
        ref = oracles.of_root(name, lambda w, f=f: f.eval(w))
        assert oracles.norm(phi(ctx, f) - ref) <= 1e-6 * cond * max(1.0, oracles.norm(ref))


def test_anchor(family):
    _, ctx = family
    assert ctx.anchor_residual() < 1e-8


def test_multiplicativity(family):
    _, ctx = family
    for i, f in enumerate(SHIPPED_F):
        for g in SHIPPED_F[i:]:
            assert multiplicativity_residual(ctx, f, g) < 1e-6


def test_regularizer_independence(diag14):
    for f in SHIPPED_F + [symbols.abs_t()]:
        assert regularizer_independence(diag14, f) < 1e-6


def test_regularizer_power_and_limit():
    assert regularizer_power(symbols.exp_abs(1.0)) == 1
    assert regularizer_power(symbols.abs_t()) == 1
    poly = FunctionOnLine(lambda t: np.asarray(t, float) ** 20, even=True, decay_hint=("polynomial", 20))
    with pytest.raises(NotRegularizable):
        regularizer_power(poly)


def test_cache_reproducible(diag14):
    f = symbols.exp_abs(0.3)
    first = phi(diag14, f)
    fresh = CalcContext(diag14.provider)
    assert oracles.norm(phi(fresh, f) - first) < 1e-12
    assert ("phi", f.key, 1, diag14.n_points, None) in diag14._cache


def test_resolvent_B_examples(scalar4, diag14):
    assert abs(resolvent_B(scalar4, -1.0)[0, 0] + 1 / 3) < 1e-8
    zero = CalcContext.from_matrix([[0.0]])
    assert abs(resolvent_B(zero, 1j)[0, 0] + 1j) < 1e-8
    ref = np.diag([1 / (3j - 1), 1 / (3j - 2)])
    assert oracles.norm(resolvent_B(diag14, 3j) - ref) < 1e-8
    with pytest.raises(SpectrumTooClose):
        resolvent_B(diag14, 2.0)


def test_norm_bound(family):
    _, ctx = family
    rng = np.random.default_rng(8)
    for kind in ("atomic", "density", "mixed"):
        T, bound = measure_norm_ok(ctx, measures.random_even_measure(rng, kind))
        assert T <= bound * (1 + 1e-9)


def test_convergence_lemma(scalar4):
    fam = lambda a: symbols.exp_abs(complex(a, 1.0))
    rec = convergence_lemma_check(scalar4, fam, symbols.exp_abs(1j), np.array([1.0]), [0.4, 0.2, 0.1, 0.05, 0.025])
    expected = [abs(np.exp(-(a + 1j) * 2) - np.exp(-2j)) for a in rec.alphas]
    assert np.allclose(rec.errors, expected, atol=1e-6)
    ref_slope = np.polyfit(np.log(rec.alphas), np.log(expected), 1)[0]
    assert rec.monotone and abs(rec.slope - ref_slope) < 1e-3
    same = convergence_lemma_check(scalar4, lambda a: symbols.regularizer(1), symbols.regularizer(1), np.array([1.0]), [0.5, 0.1])
    assert max(same.errors) == 0.0


def test_convergence_lemma_hypothesis_check(scalar4):
    blow = lambda a: FunctionOnLine(
        lambda t: np.exp(-np.abs(np.asarray(t))) / a, lambda t: -np.sign(t) * np.exp(-np.abs(np.asarray(t))) / a, even=True
    )
    with pytest.raises(HypothesisViolated):
        convergence_lemma_check(scalar4, blow, symbols.exp_abs(1.0), np.array([1.0]), [1e-3, 1e-7], sup_cap=1e6)
