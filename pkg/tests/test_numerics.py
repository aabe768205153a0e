import cmath
import math

import pytest
from gmpy2 import mpq

from saddlenode.errors import NonHyperbolic, SingularEncounter
from saddlenode.normal_forms import ECALLE2, make_named
from saddlenode.numerics import (
    PathSpec,
    compose_jets,
    finite_difference_jet,
    holonomy_jet,
    integrate_leaf,
    invert_jet,
    koenigs_check,
)
from saddlenode.series import TruncatedSeries1, TruncatedSeries2
from saddlenode.vfield import PlanarVectorField

N = 6
X, Y = TruncatedSeries2.x(N), TruncatedSeries2.y(N)
LOOP = PathSpec()


def linear(lam):
    return PlanarVectorField(X, Y * lam)


@pytest.mark.parametrize("lam", [mpq(1, 3), mpq(-1, 2), mpq(2), mpq(-7, 5)])
def test_leaf_endpoint_linear(lam):
    y0 = 0.3 + 0.1j
    end = integrate_leaf(linear(lam), LOOP, y0)
    assert abs(end - cmath.exp(2j * math.pi * float(lam)) * y0) < 1e-9


def test_leaf_half_turn():
    assert abs(integrate_leaf(linear(mpq(-1, 2)), LOOP, 0.2) + 0.2) < 1e-10


def test_linear_holonomy_jet():
    jet = holonomy_jet(linear(mpq(2, 7)), LOOP, 3)
    assert abs(jet.multiplier - cmath.exp(2j * math.pi * 2 / 7)) < 1e-9
    assert all(abs(c) < 1e-9 for c in jet.coefficients[1:])
    assert all(e < 1e-7 for e in jet.error_estimates)


def test_ecalle2_multiplier():
    mu = mpq(1, 5)
    T = TruncatedSeries1.var(N)
    E = make_named(ECALLE2, N, f=T.scale(mu) + (T * T).scale(mpq(1, 10)))
    jet = holonomy_jet(E, LOOP, 2)
    assert abs(jet.multiplier - cmath.exp(2j * math.pi * 0.2)) < 1e-6


def test_segment_transport_matches_closed_form():
    # ∂x + y²∂y from x = 0 to x = 1: y ↦ y/(1 − y) = y + y² + y³ + …
    F = PlanarVectorField(TruncatedSeries2.one(N), Y * Y)
    seg = PathSpec(kind="segment", start=0, end=1)
    jet = holonomy_jet(F, seg, 3)
    assert all(abs(c - 1) < 1e-9 for c in jet.coefficients)
    fd = finite_difference_jet(F, seg, 3)
    assert all(abs(a - b) < 1e-8 for a, b in zip(fd, jet.coefficients))


def test_variational_vs_finite_difference_on_ecalle2():
    T = TruncatedSeries1.var(N)
    E = make_named(ECALLE2, N, f=T.scale(mpq(1, 3)) + T * T)
    a = holonomy_jet(E, LOOP, 3).coefficients
    b = finite_difference_jet(E, LOOP, 3)
    assert all(abs(u - v) < 1e-8 * max(1, abs(u)) for u, v in zip(a, b))


def test_reversed_loop_inverts_holonomy():
    T = TruncatedSeries1.var(N)
    E = make_named(ECALLE2, N, f=T.scale(mpq(1, 4)) + T * T)
    fwd = holonomy_jet(E, LOOP, 3).coefficients
    bwd = holonomy_jet(E, LOOP.reversed(), 3).coefficients
    comp = compose_jets(fwd, bwd)
    assert abs(comp[0] - 1) < 1e-9 and all(abs(c) < 1e-8 * abs(f) for c, f in zip(comp[1:], fwd[1:]))
    inv = invert_jet(fwd)
    assert all(abs(u - v) < 1e-9 * max(1, abs(v)) for u, v in zip(inv, bwd))


def test_invert_jet_closed_form():
    # y ↦ λy + a y²: inverse starts y/λ − a y²/λ³
    lam, a = 2 + 1j, 0.5
    inv = invert_jet([lam, a, 0])
    assert abs(inv[0] - 1 / lam) < 1e-15 and abs(inv[1] + a / lam ** 3) < 1e-15
    comp = compose_jets([lam, a, 0], inv)
    assert abs(comp[0] - 1) < 1e-15 and abs(comp[1]) < 1e-15 and abs(comp[2]) < 1e-14


def test_non_invariant_axis_rejected():
    with pytest.raises(SingularEncounter):
        holonomy_jet(PlanarVectorField(X, Y + X), LOOP, 1)


def test_koenigs_examples():
    rep = koenigs_check([2, 1, 0, 0, 0, 0, 0, 0])
    assert rep.residual < 1e-10 and rep.jet_order == 8
    rep = koenigs_check([3, 0, 0])
    assert rep.linearizer == [1, 0, 0]
    with pytest.raises(NonHyperbolic):
        koenigs_check([cmath.exp(0.7j), 1])
