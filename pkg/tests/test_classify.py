import itertools
import math

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from saddlenode.brjuno import (
    CONVERGED,
    DIVERGED,
    INCONCLUSIVE,
    PartialQuotients,
    QuadraticSurd,
    brjuno_report,
    convergents,
    golden_ratio,
    liouville,
)
from saddlenode.classify import (
    IRRATIONAL_SADDLE,
    NILPOTENT,
    NON_SINGULAR,
    POINCARE_NON_RESONANT,
    REAL_FOCUS,
    RESONANT_NODE,
    RESONANT_SADDLE,
    SADDLE_NODE,
    ZERO_LINEAR_PART,
    classify,
    eigen_data,
    es_resonance_check,
)
from saddlenode.coeffs import coeff
from saddlenode.errors import RationalInput
from saddlenode.series import TruncatedSeries2
from saddlenode.vfield import CoordinateChange, PlanarVectorField, pullback

from .conftest import series2, small_rationals

N = 6
X, Y = TruncatedSeries2.x(N), TruncatedSeries2.y(N)


def linear(a, b, c, d):
    return PlanarVectorField(X * a + Y * b, X * c + Y * d)


def test_eigen_data_examples():
    mu = mpq(1, 3)
    ed = eigen_data(PlanarVectorField(X * X, Y + X * Y * mu))
    assert {ed.lambda1, ed.lambda2} == {0, 1}
    ed = eigen_data(linear(0, 0, 5, 1))
    assert {ed.lambda1, ed.lambda2} == {0, 1}
    ed = eigen_data(linear(2, -3, 3, 2))
    assert {ed.lambda1, ed.lambda2} == {coeff(2, 3), coeff(2, -3)}


@pytest.mark.parametrize("fieldargs, variant, params", [
    ((1, 0, 0, 2), RESONANT_NODE, {"k": 2}),
    ((2, 0, 0, -3), RESONANT_SADDLE, {"p": 3, "q": 2}),
    ((0, 0, 0, 1), SADDLE_NODE, {}),
    ((1, 0, 0, mpq(1, 2)), RESONANT_NODE, {"k": 2}),
    ((1, 0, 0, mpq(3, 2)), POINCARE_NON_RESONANT, {}),
    ((1, -2, 2, 1), REAL_FOCUS, {"a": 1, "b": 2}),
    ((0, 1, 0, 0), NILPOTENT, {}),
    ((0, 0, 0, 0), ZERO_LINEAR_PART, {}),
])
def test_classify_table(fieldargs, variant, params):
    c = classify(linear(*fieldargs))
    assert c.variant == variant
    for k, v in params.items():
        assert c.params[k] == v


def test_classify_nonsingular_and_irrational_saddle():
    assert classify(PlanarVectorField(TruncatedSeries2.one(N), Y)).variant == NON_SINGULAR
    # trace 1, det -1: eigenvalues (1 ± √5)/2, ratio -(3 ± √5)/2
    c = classify(linear(0, 1, 1, 1))
    assert c.variant == IRRATIONAL_SADDLE
    assert c.params["verdict"] == CONVERGED


@given(small_rationals(9, 7).filter(lambda r: r != 0), st.data())
def test_eigenratio_invariant_under_conjugacy(lam, data):
    F = linear(1, 0, 0, lam) + PlanarVectorField(*(data.draw(series2(N, 3, 2)) for _ in range(2)))
    a = data.draw(series2(N, 3, 2))
    b = data.draw(series2(N, 3, 2))
    phi = CoordinateChange(X * 2 + Y + a, X + Y + b)
    r1, r2 = eigen_data(F).ratio, eigen_data(pullback(F, phi)).ratio
    assert r1 == r2
    assert classify(F).variant == classify(pullback(F, phi)).variant


def test_es_resonance_examples():
    assert es_resonance_check("inf", mpq(1), 10) == []
    assert (1, 1) in es_resonance_check("inf", mpq(-2), 10)
    for s in ("inf", 1, mpq(1, 3), 4):
        assert es_resonance_check(s, coeff("1/2+1i"), 12) == []
        assert es_resonance_check(s, mpq(5, 2), 12) == []


def test_es_resonance_enumeration_oracle():
    mu, s = mpq(-3, 2), mpq(2)
    brute = [(m, n) for n in range(1, 13) for m in range(1, 13)
             if mpq(n) / s + 1 <= m < mpq(n) / s + 2 and (m + mu * n).denominator == 1 and m + mu * n <= 0]
    assert es_resonance_check(s, mu, 12) == brute


def test_convergents_of_golden_ratio_are_fibonacci():
    qs = [q for _, q in itertools.islice(convergents(golden_ratio().partial_quotients()), 12)]
    assert qs == [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144]


def test_surd_partial_quotients():
    it = QuadraticSurd(0, 1, 2).partial_quotients()
    assert [next(it) for _ in range(6)] == [1, 2, 2, 2, 2, 2]


def test_brjuno_golden_converges():
    r = brjuno_report(golden_ratio())
    assert r.verdict == CONVERGED
    assert abs(r.partial_sums[-1] - 3.28613) < 1e-4


def test_brjuno_rational_rejected():
    with pytest.raises(RationalInput):
        brjuno_report(mpq(1, 2))


def test_brjuno_diverged_path():
    # one enormous partial quotient early on: log(q_{n+1})/q_n is about 4600
    r = brjuno_report(PartialQuotients(lambda n: 10 ** 2000 if n == 2 else (0 if n == 0 else 1)))
    assert r.verdict == DIVERGED
    assert r.partial_sums[-1] > 1e3


def test_brjuno_inconclusive_budget():
    r = brjuno_report(QuadraticSurd(0, 1, 2), max_terms=5)
    assert r.verdict == INCONCLUSIVE and len(r.partial_sums) == 5


def test_liouville_sum_levels_off():
    # Σ 10^(-k!) is a Brjuno number: the sum settles near 2.80318
    r = brjuno_report(liouville(), max_terms=200)
    assert r.partial_sums[-1] < 3
    assert math.isclose(r.partial_sums[-1], 2.80318, abs_tol=1e-4)
