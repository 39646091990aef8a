import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from cosred import reduction
from cosred.errors import KernelPeakUnresolved
from cosred.measures import tv_norm
from cosred.phillips import CalcContext, define_B


@pytest.fixture(scope="module")
def zero():
    return CalcContext.from_matrix([[0.0]])


@pytest.fixture(scope="module")
def scalar4():
    return CalcContext.from_matrix([[4.0]])


@pytest.fixture(scope="module")
def diag14():
    return CalcContext.from_matrix(np.diag([1.0, 4.0]))


def test_T_B_examples(zero, scalar4):
    for lam in (1.0, 0.3 + 2j, 5 - 1j):
        assert abs(reduction.T_B_poisson(zero, lam)[0, 0] - 1.0) < 1e-8
    assert abs(reduction.T_B_poisson(scalar4, 1.0)[0, 0] - 0.1353353) < 1e-7
    assert abs(reduction.T_B_poisson(scalar4, 1 + 1j)[0, 0] - np.exp(-2 * (1 + 1j))) < 1e-8


def test_T_B_errors(scalar4):
    with pytest.raises(ValueError):
        reduction.T_B_poisson(scalar4, -1.0)
    with pytest.raises(KernelPeakUnresolved):
        reduction.T_B_poisson(scalar4, 1e-6 + 3j)


def test_T_B_calculus_route(diag14):
    for lam in (0.7, 1 + 2j):
        assert oracles.norm(reduction.T_B_poisson(diag14, lam) - reduction.phi_semigroup(diag14, lam)) < 1e-6


def test_semigroup_residuals(zero, scalar4, diag14):
    assert max(reduction.semigroup_residuals(zero, 1.0, 1.0)) < 1e-8
    assert reduction.semigroup_residuals(scalar4, 1.0, 1.0)[0] < 1e-8
    assert max(reduction.semigroup_residuals(diag14, 0.5, 1.5)) < 1e-6


def test_U_boundary_examples(scalar4, diag14):
    val = reduction.U_boundary(scalar4, 1.0)[0, 0]
    assert abs(val.real + 0.4161468) < 1e-6 and abs(val.imag + 0.9092974) < 1e-6
    assert oracles.norm(reduction.U_boundary(diag14, 0.0) - np.eye(2)) < 1e-6
    assert oracles.norm(reduction.U_boundary(diag14, np.pi) - np.diag([-1.0, 1.0])) < 1e-6


def test_U_boundary_schedule_checks(scalar4):
    with pytest.raises(ValueError):
        reduction.U_boundary(scalar4, 1.0, schedule=[0.1, 0.2])
    with pytest.raises(ValueError):
        reduction.U_boundary(scalar4, 1.0, schedule=[0.1, 1e-6])


def test_sine_function(zero, scalar4):
    for s in (0.3, -1.7, 5.0):
        assert abs(reduction.sine_function(scalar4, s)[0, 0] - np.sin(2 * s) / 2) < 1e-12
        assert abs(reduction.sine_function(zero, s)[0, 0] - s) < 1e-12
    assert reduction.sine_function(scalar4, 0.0)[0, 0] == 0


def test_U_euler(scalar4, diag14):
    assert abs(reduction.U_euler(scalar4, 1.0)[0, 0] - np.exp(-2j)) < 1e-12
    assert oracles.norm(reduction.U_euler(diag14, 0.0) - np.eye(2)) < 1e-12


def test_U_euler_unitary_on_hermitian(family):
    name, ctx = family
    if name not in oracles.HERMITIAN:
        pytest.skip("unitarity only holds for Hermitian generators")
    B = define_B(ctx)
    rng = np.random.default_rng(3)
    x = rng.standard_normal(ctx.dim) + 1j * rng.standard_normal(ctx.dim)
    for s in (0.5, -3.0, 20.0):
        assert abs(np.linalg.norm(reduction.U_euler(ctx, s, B) @ x) - np.linalg.norm(x)) < 1e-8 * np.linalg.norm(x)


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_group_law(s, r):
    ctx = _diag()
    B = define_B(ctx)
    U = lambda x: reduction.U_euler(ctx, x, B)
    assert oracles.norm(U(s) @ U(r) - U(s + r)) < 1e-10


_D = {}


def _diag():
    if "ctx" not in _D:
        _D["ctx"] = CalcContext.from_matrix(np.diag([0.0, 1.0, 4.0]))
    return _D["ctx"]


def test_generator_is_minus_iB(diag14):
    (h1, r1), (h2, r2) = reduction.generator_residuals(diag14)
    assert r2 < r1
    assert 5 < r1 / r2 < 20


def test_cosine_recovery(family):
    _, ctx = family
    B = define_B(ctx)
    for s in (0.1, 1.0, np.pi):
        assert reduction.cosine_recovery_residual(ctx, s, B) < 1e-6


def test_pv_examples(zero, scalar4, diag14):
    assert oracles.norm(reduction.pv_truncated(zero, 0.6, 1e-3, 1e3)) < 1e-12
    assert abs(reduction.pv_truncated(scalar4, 0.6, 1e-3, 1e3)[0, 0] - np.sin(1.2)) < 2e-3
    s, a, b = 0.6, 1e-2, 50.0
    G = lambda c: reduction.G_operator(diag14, s, c)
    identity = reduction.pv_truncated(diag14, s, a, b) - (2 / np.pi) * (G(b) - G(a))
    assert oracles.norm(identity) < 1e-8
    with pytest.raises(ValueError):
        reduction.pv_truncated(scalar4, 0.6, 1.0, 0.5)


def test_pv_quadrature_against_closed_form(family):
    name, ctx = family
    val = reduction.pv_truncated(ctx, 0.6, 1e-2, 100.0)
    ref = oracles.of_root(name, lambda w: (2 / np.pi) * np.sin(0.6 * w) * (oracles.Si(100.0 * w) - oracles.Si(1e-2 * w)))
    assert oracles.norm(val - ref) < 1e-9 * ctx.provider.condition_number


@given(st.floats(-1e3, 1e3))
def test_H_odd(t):
    assert abs(reduction.H(-t) + reduction.H(t)) <= 1e-12


@given(st.floats(10.0, 1e6))
def test_F_even_and_decays(t):
    assert reduction.F(-t) == reduction.F(t)
    assert abs(reduction.F(t)) <= 2 / t


def test_special_values():
    assert abs(reduction.H(1e4) - np.pi / 2) < 2e-4
    assert abs(reduction.H(-1e4) + np.pi / 2) < 2e-4
    assert abs(reduction.F(0.0) + np.pi / 2) < 1e-12
    assert abs(tv_norm(reduction.mu_c(2.0)) - 1.0) < 1e-10
    assert reduction.eval_special("g", 1.0, 2.0, 0.0) == 0.0
    with pytest.raises(ValueError):
        reduction.eval_special("K", 1.0)
    with pytest.raises(ValueError):
        reduction.G(1.0, 0.0, 1.0)


def test_mu_c_transform_matches_G(diag14):
    # with the negative atom, T_{mu_c} = B F(cB)
    c = 0.7
    w = np.array([1.0, 2.0])
    T = reduction.G_measure_operator(diag14, c)
    ref = np.diag(w * (oracles.Si(c * w) - np.pi / 2))
    assert oracles.norm(T - ref) < 1e-8


def test_mu_c_tv_norms():
    for c, tv in reduction.mu_c_tv_norms():
        assert abs(tv - 2 / c) < 1e-10


def test_G_h1_distance_decreases():
    d = [v for _, v in reduction.G_h1_distance(0.8, [1.0, 0.3, 0.1, 0.03])]
    assert all(b < a for a, b in zip(d, d[1:]))


def test_G_limit_at_infinity(family):
    _, ctx = family
    norms = [oracles.norm(reduction.G_operator(ctx, 1.0, b)) for b in (10.0, 100.0, 1000.0)]
    for b, n in zip((10.0, 100.0, 1000.0), norms):
        assert n <= 2 * ctx.M / b * 1.5
    assert norms[-1] < norms[0]


def test_bound_scan_examples(zero, diag14):
    rep = reduction.bound_scan(zero, "T_B")
    assert np.allclose(rep.norms, 1.0, atol=1e-8)
    rep = reduction.bound_scan(diag14, "U", jobs=2)
    assert abs(rep.supremum - 1.0) < 1e-6 and rep.satisfied
    rep = reduction.bound_scan(diag14, "G")
    assert rep.satisfied
    with pytest.raises(ValueError):
        reduction.bound_scan(diag14, "nope")


def test_bound_scan_nonnormal():
    from cosred import families

    ctx = CalcContext.from_matrix(families.similarity([1.0, 4.0], 10.0))
    rep = reduction.bound_scan(ctx, "T_B", grid=[0.5, 1 + 1j, 0.01 + 3j])
    assert rep.satisfied and rep.comparison == pytest.approx(5 * ctx.M**2)


def test_bound_scan_report_serialization(diag14):
    import json

    rep = reduction.bound_scan(diag14, "U", grid=[0.0, 1.0])
    d = json.loads(rep.to_json())
    assert d["supremum"] == rep.supremum and d["params"][1] == [1.0, 0.0]
    lines = rep.to_csv().splitlines()
    assert lines[0] == "param_re,param_im,norm,bound,satisfied" and len(lines) == 3
