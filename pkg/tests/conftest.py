import random

import pytest
from gmpy2 import mpq
from hypothesis import settings
from hypothesis import strategies as st

from saddlenode.series import TruncatedSeries1, TruncatedSeries2

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")


def small_rationals(max_num=5, max_den=4):
    return st.builds(lambda p, q: mpq(p, q), st.integers(-max_num, max_num), st.integers(1, max_den))


def series2(order, max_terms=6, min_degree=0):
    """Hypothesis strategy for sparse bivariate series with small rational coefficients."""
    keys = [(i, j) for i in range(order + 1) for j in range(order + 1 - i) if i + j >= min_degree]
    return st.dictionaries(st.sampled_from(keys), small_rationals(), max_size=max_terms).map(
        lambda d: TruncatedSeries2(order, d))


def series1(order, max_terms=5, min_degree=0):
    return st.lists(small_rationals(), min_size=order + 1, max_size=order + 1).map(
        lambda c: TruncatedSeries1(order, [0] * min_degree + c[min_degree:]))


def rand_q(rng: random.Random, lo=-4, hi=4, den=5):
    return mpq(rng.randint(lo, hi), rng.randint(1, den))


def rand_series1(rng: random.Random, N: int, terms: int = 4, start: int = 0):
    c = [0] * (N + 1)
    for _ in range(terms):
        c[rng.randint(start, N)] = rand_q(rng)
    return TruncatedSeries1(N, c)


def rand_series2(rng: random.Random, N: int, terms: int = 5, min_degree: int = 0):
    d = {}
    for _ in range(terms):
        deg = rng.randint(min_degree, N)
        i = rng.randint(0, deg)
        d[(i, deg - i)] = rand_q(rng)
    return TruncatedSeries2(N, d)


@pytest.fixture
def rng():
    return random.Random(20261016)
