import random

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from saddlenode.errors import NotSaddleNode, TruncationTooShallow, UnsupportedClass, ZeroLinearCoefficient
from saddlenode.normal_forms import (
    BRJUNO,
    ECALLE1,
    ECALLE2,
    FORMAL_MODEL,
    PD_FOCUS,
    PD_LINEAR,
    PD_NODE,
    PD_RESONANT_SADDLE,
    PD_SADDLE_NODE,
    NamedForm,
    apply_homothety,
    dulac_prenormalize,
    formal_normal_form,
    homothety_orbit_equal,
    linearize_1d,
    make_named,
    pd_mu_to_dulac,
    recognize,
)
from saddlenode.series import TruncatedSeries1, TruncatedSeries2, revert1
from saddlenode.vfield import CoordinateChange, PlanarVectorField, pullback

from . import oracles
from .conftest import rand_q, rand_series2, series1, small_rationals

N = 8
X, Y = TruncatedSeries2.x(N), TruncatedSeries2.y(N)
T = TruncatedSeries1.var(N)


def one_d_pushforward_is_linear(g, N):
    """Pushforward of y·g(y)∂y by y ↦ φ(y), as a 2-D field, equals g(0)·y∂y."""
    phi = linearize_1d(g)
    Xs, Ys = TruncatedSeries2.x(N), TruncatedSeries2.y(N)
    F = PlanarVectorField(Xs, Ys * TruncatedSeries2.from_1d(g, "y"))
    change = CoordinateChange(Xs, TruncatedSeries2.from_1d(revert1(phi), "y"))
    return pullback(F, change) == PlanarVectorField(Xs, Ys * g[0])


def test_linearize_1d_examples():
    assert linearize_1d(TruncatedSeries1.constant(3, N)) == T
    assert one_d_pushforward_is_linear(TruncatedSeries1(12, [1, 1]), 12)
    with pytest.raises(ZeroLinearCoefficient):
        linearize_1d(T)


def test_linearize_1d_against_undetermined_coefficients():
    N6 = 6
    g = TruncatedSeries1(N6, [1, -1])
    phi = linearize_1d(g)
    ref = oracles.undetermined_linearizer(g.coeffs, N6)
    assert [oracles._num(c) for c in phi.coeffs] == ref


@given(series1(N, min_degree=1), small_rationals().filter(lambda r: r != 0))
def test_linearize_1d_property(g, g0):
    g = g + g0
    phi = linearize_1d(g)
    # φ'(y)·y·g(y) = g(0)·φ(y)
    assert phi.derive().with_order(N) * T * g == phi.scale(g0)


def test_make_named_formal_equals_ecalle1():
    mu = mpq(2, 9)
    assert make_named(ECALLE1, N, f=T.scale(mu)) == make_named(FORMAL_MODEL, N, k=1, mu=mu)


def test_recognize_examples():
    mu = mpq(1, 4)
    f = TruncatedSeries1(N, [mu, 2, 0, 1])
    F = make_named(BRJUNO, N, f=f, n=2)
    got = recognize(F)
    assert got.variant == BRJUNO and got.params["n"] == 2 and got.params["f"] == f
    assert recognize(PlanarVectorField(TruncatedSeries2.one(N), TruncatedSeries2.zero(N))) is None
    E = PlanarVectorField(X * X, Y + X * Y * Y)
    got = recognize(E)
    assert got.variant == ECALLE2 and got.params["f"] == T * T


def test_homothety_examples():
    A = NamedForm(ECALLE2, {"f": T + T * T})
    assert homothety_orbit_equal(A, apply_homothety(A, 2)) == 2
    assert homothety_orbit_equal(A, A) == 1
    B1 = NamedForm(ECALLE2, {"f": T})
    B2 = NamedForm(ECALLE2, {"f": T + T ** 3})
    assert homothety_orbit_equal(B1, B2) is None


@given(small_rationals().filter(lambda r: r != 0), st.lists(small_rationals(), min_size=3, max_size=3))
def test_homothety_is_a_conjugacy(c, coeffs):
    f = TruncatedSeries1(N, [0] + coeffs)
    A = NamedForm(ECALLE2, {"f": f})
    B = apply_homothety(A, c)
    # y = c·Y: pulling A back by (x, cY) gives B's field
    assert pullback(A.field(N), CoordinateChange.linear(1, 0, 0, c, N)) == B.field(N)


def test_dulac_on_model_is_trivial():
    mu = mpq(1, 3)
    D = dulac_prenormalize(make_named(FORMAL_MODEL, 12, k=1, mu=mu))
    assert (D.k, D.mu) == (1, mu)
    assert D.remainder.is_zero()
    assert D.change.is_identity()


def test_dulac_after_shear():
    # x²∂x + y∂y + x f∂y with f(0) = c ≠ 0: y is not invariant, k = 1 after a shear
    F = PlanarVectorField(X * X, Y + X * (2 + Y * 3))
    D = dulac_prenormalize(F)
    assert D.k == 1
    assert pullback(F, D.change) == D.field() * D.unit


def test_dulac_higher_k():
    mu = mpq(-5, 2)
    D = dulac_prenormalize(make_named(FORMAL_MODEL, 10, k=2, mu=mu))
    assert (D.k, D.mu) == (2, mu)


def test_dulac_errors():
    with pytest.raises(NotSaddleNode):
        dulac_prenormalize(PlanarVectorField(X, Y))
    with pytest.raises(TruncationTooShallow):
        dulac_prenormalize(make_named(FORMAL_MODEL, 12, k=1, mu=1), N=20)


@given(st.integers(0, 10_000))
def test_dulac_invariance_property(seed):
    rng = random.Random(seed)
    N6 = 6
    mu = rand_q(rng)
    F = make_named(FORMAL_MODEL, N6, k=1, mu=mu)
    phi = CoordinateChange(TruncatedSeries2.x(N6) + rand_series2(rng, N6, 2, 2),
                           TruncatedSeries2.y(N6) + rand_series2(rng, N6, 2, 2))
    D = dulac_prenormalize(pullback(F, phi))
    assert (D.k, D.mu) == (1, mu)


def test_formal_linear_diagonal():
    F = PlanarVectorField(X, Y * mpq(1, 2))
    C = formal_normal_form(F)
    assert C.target.variant == PD_LINEAR and C.change.is_identity() and C.check()


def test_formal_resonant_node():
    F = PlanarVectorField(X, Y * 2 + X * X)
    C = formal_normal_form(F)
    assert C.check()
    assert C.target.variant in (PD_NODE, PD_LINEAR)
    # the resonant monomial x² cannot be removed: the model is the nonlinear one
    assert C.target.variant == PD_NODE and C.target.params["k"] == 2


def test_formal_focus():
    F = PlanarVectorField(X - Y * 2 + X * Y, X * 2 + Y + Y * Y)
    C = formal_normal_form(F)
    assert C.target.variant == PD_FOCUS and C.check()


def test_formal_resonant_saddle():
    F = PlanarVectorField(X + X * X * Y, -Y + X * Y * Y + Y * Y)
    C = formal_normal_form(PlanarVectorField(F.fx.with_order(5), F.fy.with_order(5)))
    assert C.target.variant == PD_RESONANT_SADDLE and C.check()


def test_formal_saddle_node_agrees_with_dulac():
    # x∂x + (y² + y³)∂y: saddle-node with the zero eigenvalue on ∂y
    F = PlanarVectorField(X, Y * Y + Y ** 3)
    C = formal_normal_form(F)
    assert C.target.variant == PD_SADDLE_NODE and C.check()
    k, mu_pd = C.target.params["k"], C.target.params["mu"]
    assert (k, mu_pd) == (1, 1)
    D = dulac_prenormalize(F.swap())
    assert (D.k, D.mu) == (k, pd_mu_to_dulac(mu_pd))


def test_formal_unsupported():
    with pytest.raises(UnsupportedClass):
        formal_normal_form(PlanarVectorField(Y, X * X))
