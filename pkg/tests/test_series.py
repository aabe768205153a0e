import itertools

import pytest
from gmpy2 import mpq
from hypothesis import given

from saddlenode.coeffs import GaussianRational, coeff
from saddlenode.errors import DivisionByNonUnit, TruncationMismatch
from saddlenode.series import (
    LaurentSlice,
    TruncatedSeries1,
    TruncatedSeries2,
    compose1,
    compose2,
    derive,
    divide,
    integrate1,
    invert_series_pair,
    residue,
    revert1,
)

from .conftest import series1, series2

N = 6
X, Y = TruncatedSeries2.x(N), TruncatedSeries2.y(N)


def test_difference_of_squares():
    assert (1 + X) * (1 - X) == 1 - X * X


def test_geometric_series():
    g = divide(TruncatedSeries2.one(N), 1 - Y)
    assert all(g.coeff(0, j) == 1 for j in range(N + 1))
    assert len(g.terms) == N + 1


def test_non_unit_divisor():
    with pytest.raises(DivisionByNonUnit):
        divide(Y, Y)


def test_order_mismatch():
    with pytest.raises(TruncationMismatch):
        X + TruncatedSeries2.y(N + 1)


def test_compose2_examples():
    assert compose2(X + Y, X, Y) == X + Y
    assert compose2(X * Y, X * X, Y) == X * X * Y


def test_compose2_geometric_against_brute_force():
    # f = 1/(1-x) truncated, u = v = y: f(y) = sum y^n, so [y^3] = 1;
    # brute force by expanding each monomial power separately
    f = (1 - X).inverse()
    got = compose2(f, Y, Y)
    brute = {}
    for (i, j), c in f.terms.items():
        n = i + j
        brute[n] = brute.get(n, 0) + c
    assert all(got.coeff(0, n) == brute.get(n, 0) for n in range(N + 1))
    assert got.coeff(0, 3) == 1


def _compositions(n):
    """Brute-force count of ordered compositions of n into positive parts."""
    return sum(1 for cuts in itertools.product((0, 1), repeat=n - 1))


def test_compose2_counts_compositions():
    # 1/(1 - u) with u = y/(1 - y) = y + y^2 + ...: [y^n] counts compositions of n
    f = (1 - X).inverse()
    u = Y * (1 - Y).inverse()
    got = compose2(f, u, Y)
    assert [got.coeff(0, n) for n in range(1, N + 1)] == [_compositions(n) for n in range(1, N + 1)]


def test_invert_pair_examples():
    assert invert_series_pair(X, Y) == (X, Y)
    U, V = invert_series_pair(X + Y * Y, Y)
    assert (U, V) == (X - Y * Y, Y)
    assert compose2(X + Y * Y, U, V) == X
    assert invert_series_pair(Y, X) == (Y, X)


def test_derive_integrate_examples():
    assert derive(X * X * Y, "x") == 2 * X * Y
    t = integrate1(TruncatedSeries1.one(N))
    assert t.coeffs[:2] == (0, 1) and all(c == 0 for c in t.coeffs[2:])
    log = integrate1((TruncatedSeries1.one(N) + TruncatedSeries1.var(N)).inverse())
    assert list(log.coeffs[1:N + 2]) == [mpq((-1) ** (n + 1), n) for n in range(1, N + 2)]


def test_residue_examples():
    mu = mpq(2, 7)
    assert residue(LaurentSlice(1, TruncatedSeries1.one(N))) == 1
    s = TruncatedSeries1(N, [1, mu])
    assert residue(LaurentSlice(2, s)) == mu
    s2 = s * (TruncatedSeries1.one(N) + TruncatedSeries1.var(N)).inverse()
    assert residue(LaurentSlice(2, s2)) == mu - 1


def test_gaussian_coefficients():
    c = coeff("1/2+3/4i")
    assert isinstance(c, GaussianRational)
    assert c * c.conjugate() == mpq(1, 4) + mpq(9, 16)
    assert coeff("0.25") == mpq(1, 4)
    with pytest.raises(TypeError):
        coeff(0.25)


@given(series2(N), series2(N), series2(N))
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@given(series2(N, min_degree=0))
def test_unit_inverse(a):
    u = a + 1 if a.constant_term != -1 else a + 2
    assert u * u.inverse() == TruncatedSeries2.one(N)


@given(series2(N), series2(N))
def test_leibniz(a, b):
    for v in ("x", "y"):
        assert (a * b).derive(v).with_order(N - 1) == (a.derive(v) * b + a * b.derive(v)).with_order(N - 1)


@given(series1(N))
def test_derive_integrate_roundtrip(f):
    assert integrate1(f).derive().with_order(N) == f


@given(series1(N, min_degree=2))
def test_revert1(g):
    g = g + TruncatedSeries1.var(N)
    h = revert1(g)
    assert compose1(g, h) == TruncatedSeries1.var(N)
    assert compose1(h, g) == TruncatedSeries1.var(N)


@given(series2(N, min_degree=2), series2(N, min_degree=2))
def test_invert_pair_property(p, q):
    u, v = X + 2 * Y + p, Y + q
    U, V = invert_series_pair(u, v)
    assert compose2(u, U, V) == X and compose2(v, U, V) == Y


@given(series2(N), series2(N, min_degree=1), series2(N, min_degree=1))
def test_compose2_is_ring_map(f, u, v):
    g = f * f
    assert compose2(g, u, v) == compose2(f, u, v) * compose2(f, u, v)


def test_exp_log_identities():
    t = TruncatedSeries1.var(N)
    e = t.exp()
    assert list(e.coeffs) == [mpq(1, math_fact(n)) for n in range(N + 1)]
    assert e.log() == t


def math_fact(n):
    return 1 if n == 0 else n * math_fact(n - 1)


def test_power_and_taylor_shift():
    t = TruncatedSeries1.var(N)
    s = (1 + t).power(mpq(1, 2))
    assert s * s == 1 + t
    p = TruncatedSeries1(N, [1, 2, 3])
    # p(t + 1) = 6 + 8t + 3t^2
    assert list(p.taylor_shift(1).coeffs[:3]) == [6, 8, 3]
    for a, b in itertools.product(range(2), repeat=2):
        assert p.evaluate(a + b) == 1 + 2 * (a + b) + 3 * (a + b) ** 2
