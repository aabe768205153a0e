import math
import random

import mpmath
import pytest
from gmpy2 import mpq

from saddlenode.coeffs import coeff
from saddlenode.errors import ConstraintViolated, PoleOfGamma
from saddlenode.modular import ElizarovInput, MartinetRamisData, elizarov_derivative, gamma_exact

from . import oracles


def test_gamma_exact():
    assert gamma_exact(3) == 2 and gamma_exact(1) == 1
    g = gamma_exact(mpq(1, 2))
    assert abs(float(g) - math.sqrt(math.pi)) < 1e-15
    # reflection: Γ(1/2)² = π / sin(π/2)
    assert abs(g * g - mpmath.pi) < mpmath.mpf(10) ** -25
    with pytest.raises(PoleOfGamma):
        gamma_exact(-2)


def test_elizarov_examples():
    out = elizarov_derivative(ElizarovInput(mpq(0), {(2, 1): 1}))
    assert out.dphi == {1: 1} and out.exact[1]
    out = elizarov_derivative(ElizarovInput(mpq(0), {(1, -1): 1}))
    assert out.dt == 1 and out.exact["t"]
    out = elizarov_derivative(ElizarovInput(mpq(0), {}))
    assert out.dphi == {} and out.dt == 0
    assert out.metadata["branch"] == "principal logarithm"


def test_elizarov_pole_flagged():
    out = elizarov_derivative(ElizarovInput(mpq(-3), {(2, 1): 1, (3, 1): 1}))
    assert (2, 1) in out.flagged and (3, 1) not in out.flagged


def test_elizarov_constraints():
    with pytest.raises(ConstraintViolated):
        ElizarovInput(mpq(0), {(0, 2): 1})
    with pytest.raises(ConstraintViolated):
        ElizarovInput(mpq(0), {(1, -2): 1})
    with pytest.raises(ConstraintViolated):
        ElizarovInput(mpq(0), {(1, 1): 1})


def random_input(rng, mu):
    coefs = {}
    for _ in range(rng.randint(1, 5)):
        m, n = rng.randint(1, 6), rng.randint(-1, 6)
        if (m, n) == (1, 1) or n == 0:
            continue
        coefs[(m, n)] = coeff(mpq(rng.randint(-9, 9), rng.randint(1, 5)), mpq(rng.randint(-3, 3), 2))
    return ElizarovInput(mu, {k: v for k, v in coefs.items() if v != 0})



def test_elizarov_oracle_small_sample():
    rng = random.Random(3)
    for _ in range(10):
        inp = random_input(rng, mpq(rng.randint(-7, 7), rng.randint(2, 5)))
        out = elizarov_derivative(inp)
        ref_phi, ref_dt = oracles.elizarov_oracle(inp.mu, inp.coefficients)
        for n, v in ref_phi.items():
            assert abs(mpmath.mpc(_mpc(out.dphi[n])) - v) <= 1e-12 * max(abs(v), 1e-30)
        assert abs(mpmath.mpc(_mpc(out.dt)) - ref_dt) <= 1e-12 * max(abs(ref_dt), 1e-30)


def _mpc(v):
    if isinstance(v, (mpmath.mpc, mpmath.mpf)):
        return v
    from saddlenode.coeffs import imag_part, real_part

    return mpmath.mpc(mpmath.mpf(int(real_part(v).numerator)) / int(real_part(v).denominator),
                      mpmath.mpf(int(imag_part(v).numerator)) / int(imag_part(v).denominator))


def test_elizarov_linearity_exact_integer_mu():
    rng = random.Random(11)
    a, b = random_input(rng, mpq(2)), random_input(rng, mpq(2))
    s = elizarov_derivative(a + b)
    sa, sb = elizarov_derivative(a), elizarov_derivative(b)
    for n in s.dphi:
        assert s.dphi[n] == sa.dphi.get(n, 0) + sb.dphi.get(n, 0)
    assert s.dt == sa.dt + sb.dt
    c = coeff(mpq(3, 2), 1)
    sc = elizarov_derivative(a.scale(c))
    assert all(sc.dphi[n] == sa.dphi[n] * c for n in sa.dphi)


def test_martinet_ramis_data():
    d = MartinetRamisData(mpq(1, 4))
    assert abs(d.multiplier() - 1j) < 1e-15
    assert d.has_central_manifold() is None
    assert MartinetRamisData(mpq(1, 4), translation=0).has_central_manifold()
