"""Independent reference computations (sympy) used to check the exact pipelines."""

import sympy as sp
from gmpy2 import mpq

from saddlenode.coeffs import GaussianRational
from saddlenode.series import TruncatedSeries2

x, y = sp.symbols("x y")


def to_sympy(s: TruncatedSeries2):
    expr = 0
    for (i, j), c in s.terms.items():
        expr += _num(c) * x**i * y**j
    return expr


def _num(c):
    if isinstance(c, GaussianRational):
        return _num(c.re) + sp.I * _num(c.im)
    q = mpq(c)
    return sp.Rational(int(q.numerator), int(q.denominator))


def truncate(expr, N):
    """Taylor polynomial of total degree <= N around the origin."""
    t = sp.symbols("t")
    ser = sp.series(sp.sympify(expr).subs({x: t * x, y: t * y}), t, 0, N + 1).removeO()
    return sp.expand(ser.subs(t, 1))


def from_sympy(expr, N) -> TruncatedSeries2:
    poly = sp.Poly(sp.expand(expr), x, y)
    terms = {}
    for (i, j), c in poly.terms():
        if i + j <= N:
            c = sp.nsimplify(c)
            re, im = sp.re(c), sp.im(c)
            val = mpq(int(sp.fraction(re)[0]), int(sp.fraction(re)[1]))
            if im != 0:
                val = GaussianRational(val, mpq(int(sp.fraction(im)[0]), int(sp.fraction(im)[1])))
            terms[(i, j)] = val
    return TruncatedSeries2(N, terms)


def pullback_oracle(fx, fy, u, v, N):
    """DΦ⁻¹·(X∘Φ) by sympy matrix inversion and series truncation."""
    J = sp.Matrix([[sp.diff(u, x), sp.diff(u, y)], [sp.diff(v, x), sp.diff(v, y)]])
    comp = sp.Matrix([fx.subs({x: u, y: v}, simultaneous=True), fy.subs({x: u, y: v}, simultaneous=True)])
    res = J.inv() * comp
    return truncate(res[0], N), truncate(res[1], N)


def undetermined_linearizer(g_coeffs, N):
    """φ = y + Σ c_n y^n with g(y)·y·φ'(y) = g(0)·φ(y) mod y^(N+1), by a sympy linear solve."""
    cs = sp.symbols(f"c2:{N + 1}")
    phi = y + sum(c * y**n for c, n in zip(cs, range(2, N + 1)))
    g = sum(_num(a) * y**n for n, a in enumerate(g_coeffs))
    eq = sp.expand(g * y * sp.diff(phi, y) - g.subs(y, 0) * phi)
    eqs = [eq.coeff(y, n) for n in range(2, N + 1)]
    sol = sp.solve(eqs, cs, dict=True)[0]
    return [0, 1] + [sol[c] for c in cs]


def elizarov_oracle(mu, coefficients, dps=60):
    """Reference dφ_n and dt: mpmath.rgamma, reversed summation, powers via exp/log."""
    import mpmath

    def mp(c):
        if isinstance(c, GaussianRational):
            return mpmath.mpc(mp(c.re), mp(c.im))
        q = mpq(c)
        return mpmath.mpf(int(q.numerator)) / int(q.denominator)

    with mpmath.workdps(dps):
        m_u = mp(mu)
        by_n = {}
        for (m, n), f in coefficients.items():
            by_n.setdefault(n, []).append((m, mp(f)))
        dphi = {}
        for n in sorted(k for k in by_n if k >= 1):
            total = mpmath.mpc(0)
            for m, f in sorted(by_n[n], reverse=True):
                total += m * f * mpmath.rgamma(1 + m + m_u * n) * mpmath.mpf(-n) ** m
            pref = mpmath.exp((m_u * n - 1) * mpmath.log(n)) * mpmath.exp(-2j * mpmath.pi * n * m_u)
            dphi[n] = pref * total
        total = mpmath.mpc(0)
        for m, f in sorted(by_n.get(-1, []), reverse=True):
            total += m * f * mpmath.rgamma(1 + m - m_u)
        dt = mpmath.exp(-m_u * mpmath.log(mpmath.mpc(-1))) * mpmath.exp(2j * mpmath.pi * m_u) * total
        return dphi, dt
