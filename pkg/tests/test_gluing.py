import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from saddlenode.errors import ConstraintViolated, VanishingG
from saddlenode.gluing import (
    FoliationWithAxisLeaf,
    axis_restriction,
    flowbox_normalize,
    flowbox_normalize_field,
    omega_invariant,
    solve_axis_fixing_change,
)
from saddlenode.series import TruncatedSeries1, TruncatedSeries2, compose2
from saddlenode.vfield import PlanarVectorField, pullback

from .conftest import series2, small_rationals

N = 8
X, Y = TruncatedSeries2.x(N), TruncatedSeries2.y(N)
ONE = TruncatedSeries2.one(N)
T = TruncatedSeries1.var(N)


def test_flowbox_identity_and_composition():
    F = FoliationWithAxisLeaf(ONE, 2)
    assert flowbox_normalize(F).is_identity()
    F = FoliationWithAxisLeaf(1 + X, 2)
    phi = flowbox_normalize(F)
    assert (phi.u, phi.v) == (X + X * X, Y)
    assert compose2(F.model_function(), phi.u, phi.v) == Y + (X + X * X) * Y * Y == F.function()


def test_restriction_to_vertical_leaf():
    # on L₀ = {y = 0}: Φ₀ is the identity there iff f(x, 0) ≡ 1
    assert axis_restriction(flowbox_normalize(FoliationWithAxisLeaf(1 + Y, 1))) == T
    assert axis_restriction(flowbox_normalize(FoliationWithAxisLeaf(ONE * 2, 1))) != T


@given(series2(N, 4), st.integers(1, 4))
def test_gluing_identity_and_uniqueness(f, k):
    f = f + 1 if f.constant_term != -1 else f + 2
    F = FoliationWithAxisLeaf(f, k)
    phi = flowbox_normalize(F)
    assert compose2(F.model_function(), phi.u, phi.v) == F.function()
    # the axis-fixing normalizer is determined by F alone: x·φ̃ with φ̃ = (F − y)/(x y^k)
    recovered = solve_axis_fixing_change(F.function(), k)
    assert recovered.truncated(N - k - 1) == f.truncated(N - k - 1)
    assert (X * recovered).truncated(N - k) == phi.u.truncated(N - k)


def test_field_normalizer_axis_restrictions():
    F = FoliationWithAxisLeaf(ONE, 2, "field")
    assert axis_restriction(flowbox_normalize_field(F)) == T
    F = FoliationWithAxisLeaf(ONE * 2, 2, "field")
    assert axis_restriction(flowbox_normalize_field(F)) == T.scale(mpq(1, 2))
    F = FoliationWithAxisLeaf((1 + X).inverse(), 2, "field")
    assert axis_restriction(flowbox_normalize_field(F)) == T + (T * T).scale(mpq(1, 2))


@given(series2(N, 4), st.integers(1, 3))
def test_field_normalizer_conjugates(f, k):
    f = f + 1 if f.constant_term != -1 else f + 2
    F = FoliationWithAxisLeaf(f, k, "field")
    phi = flowbox_normalize_field(F)
    back = pullback(F.model_field(), phi)
    assert back.with_order(N - 1) == F.field().with_order(N - 1)
    assert phi.u.at_x0().is_zero()


def test_omega_examples():
    dx = PlanarVectorField(ONE, TruncatedSeries2.zero(N))
    w = omega_invariant(dx, dx + PlanarVectorField(TruncatedSeries2.zero(N), Y * Y))
    assert w.k == 2 and w.density == TruncatedSeries1.one(N) and w.integral(1) == 1
    g = 1 + X * 3
    w = omega_invariant(dx, dx + PlanarVectorField(TruncatedSeries2.zero(N), Y ** 3 * g))
    assert w.density == TruncatedSeries1(N, [1, 3])


@given(small_rationals(3, 3))
def test_omega_exponential_density(a):
    Xf = PlanarVectorField(ONE, Y * a)
    w = omega_invariant(Xf, Xf + PlanarVectorField(TruncatedSeries2.zero(N), Y * Y))
    # k = 2: density e^{a t}
    assert w.density == T.scale(a).exp()


def test_omega_base_point_change():
    # f ≡ 0, polynomial g: the density is g itself, re-expanded around x₀
    Xf = PlanarVectorField(ONE, TruncatedSeries2.zero(N))
    Yf = Xf + PlanarVectorField(TruncatedSeries2.zero(N), Y * Y * (1 + X * X))
    w0, w1 = omega_invariant(Xf, Yf, 0), omega_invariant(Xf, Yf, mpq(1, 2))
    assert w1.density == w0.density.taylor_shift(mpq(1, 2))
    # f ≡ a, g ≡ 1: both densities are e^{at}, so the verdict does not depend on x₀
    Xf = PlanarVectorField(ONE, Y * 3)
    Yf = Xf + PlanarVectorField(TruncatedSeries2.zero(N), Y * Y)
    assert omega_invariant(Xf, Yf, 0).ratio_is_constant(omega_invariant(Xf, Yf, 2))


def test_omega_errors():
    Xf = PlanarVectorField(ONE, Y)
    with pytest.raises(VanishingG):
        omega_invariant(Xf, Xf + PlanarVectorField(TruncatedSeries2.zero(N), Y * Y * X))
    with pytest.raises(ConstraintViolated):
        FoliationWithAxisLeaf(X, 1)
