"""Formal normalization: Dulac prenormal form, Poincaré–Dulac models, 1-D linearization
and the named normal forms.

Conventions
-----------
A normalization returns a change ``C`` (old coordinates as series in the new
ones) and a unit ``U`` with ``pullback(X, C) = U · target`` modulo truncation.
For vector-field (rather than foliation) normal forms ``U = 1``.

Free coefficients of resonant homological steps are set to zero and the
nonlinear part of every change is tangent to the identity; the initial linear
normalization is kept separately in ``linear_change``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from gmpy2 import mpq

from .classify import (
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
)
from .coeffs import Coefficient, exact_root, exact_roots, format_coeff, imag_part, real_part
from .errors import (
    ConstraintViolated,
    IrrationalEigendata,
    IrrationalScaling,
    NotSaddleNode,
    TruncationTooShallow,
    UnsupportedClass,
    ZeroLinearCoefficient,
)
from .series import (
    LaurentSlice,
    TruncatedSeries1,
    TruncatedSeries2,
    compose1,
    residue,
)
from .vfield import CoordinateChange, PlanarVectorField, pullback

__all__ = [
    "DulacForm",
    "NamedForm",
    "FormalConjugacy",
    "dulac_prenormalize",
    "formal_normal_form",
    "linearize_1d",
    "make_named",
    "recognize",
    "recognize_all",
    "apply_homothety",
    "homothety_orbit_equal",
    "pd_mu_to_dulac",
    "ECALLE1",
    "ECALLE2",
    "SADDLE",
    "BRJUNO",
    "FORMAL_MODEL",
    "PD_NODE",
    "PD_LINEAR",
    "PD_FOCUS",
    "PD_RESONANT_SADDLE",
    "PD_SADDLE_NODE",
]

ECALLE1 = "Ecalle1"
ECALLE2 = "Ecalle2"
SADDLE = "Saddle"
BRJUNO = "Brjuno"
FORMAL_MODEL = "FormalModel"
PD_NODE = "PDNode"
PD_LINEAR = "PDLinear"
PD_FOCUS = "PDFocus"
PD_RESONANT_SADDLE = "PDResonantSaddle"
PD_SADDLE_NODE = "PDSaddleNode"

VARIANTS = (ECALLE1, ECALLE2, SADDLE, BRJUNO, FORMAL_MODEL, PD_NODE, PD_LINEAR, PD_FOCUS,
            PD_RESONANT_SADDLE, PD_SADDLE_NODE)


# ---------------------------------------------------------------------------
# bookkeeping


class _Tracker:
    """Keeps pullback(X0, change) = unit · current through a sequence of steps."""

    def __init__(self, X: PlanarVectorField):
        N = X.order
        self.X0 = X
        self.current = X
        self.change = CoordinateChange.identity(N)
        self.unit = TruncatedSeries2.one(N)

    def pull(self, phi: CoordinateChange):
        self.current = pullback(self.current, phi)
        self.unit = phi.apply_to(self.unit)
        self.change = self.change.compose(phi)

    def divide(self, b):
        if isinstance(b, TruncatedSeries2):
            inv = b.inverse()
            self.current = self.current * inv
            self.unit = self.unit * b
        else:
            self.current = self.current.scale(1 / b)
            self.unit = self.unit.scale(b)

    def multiply(self, b):
        if isinstance(b, TruncatedSeries2):
            self.current = self.current * b
            self.unit = self.unit * b.inverse()
        else:
            self.current = self.current.scale(b)
            self.unit = self.unit.scale(1 / b)


def _split_degree(s: TruncatedSeries2, d: int) -> dict:
    return {k: v for k, v in s._terms.items() if k[0] + k[1] == d}


def _near_identity(hx: dict, hy: dict, N: int) -> CoordinateChange:
    X, Y = TruncatedSeries2.x(N), TruncatedSeries2.y(N)
    return CoordinateChange(X + TruncatedSeries2(N, hx), Y + TruncatedSeries2(N, hy))


def _solve_linear(rows: list[list], rhs: list) -> list:
    """Exact Gaussian elimination for a square nonsingular system."""
    n = len(rows)
    M = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular homological operator")
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [v / p for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def _eliminate_diagonal(tr: _Tracker, l1, l2, start: int = 2):
    """Remove all non-resonant terms for the linear part diag(l1, l2)."""
    N = tr.current.order
    for d in range(start, N + 1):
        hx, hy = {}, {}
        for (i, j), c in _split_degree(tr.current.fx, d).items():
            den = i * l1 + j * l2 - l1
            if den != 0:
                hx[(i, j)] = c / den
        for (i, j), c in _split_degree(tr.current.fy, d).items():
            den = i * l1 + j * l2 - l2
            if den != 0:
                hy[(i, j)] = c / den
        if hx or hy:
            tr.pull(_near_identity(hx, hy, N))


def _eliminate_general(tr: _Tracker, A, start: int = 2):
    """Remove every term of degree >= start when ad_L is invertible on each degree."""
    (a, b), (c, d_) = A
    N = tr.current.order
    for d in range(start, N + 1):
        basis = [(i, d - i, comp) for comp in (0, 1) for i in range(d, -1, -1)]
        index = {key: n for n, key in enumerate(basis)}
        cols = []
        for (i, j, comp) in basis:
            col = [mpq(0)] * len(basis)

            def put(ii, jj, cc, v):
                if v != 0:
                    col[index[(ii, jj, cc)]] += v

            # Dh·Lz for h = x^i y^j e_comp
            if i:
                put(i, j, comp, i * a)
                put(i - 1, j + 1, comp, i * b)
            if j:
                put(i + 1, j - 1, comp, j * c)
                put(i, j, comp, j * d_)
            # − L h
            if comp == 0:
                put(i, j, 0, -a)
                put(i, j, 1, -c)
            else:
                put(i, j, 0, -b)
                put(i, j, 1, -d_)
            cols.append(col)
        H = [mpq(0)] * len(basis)
        for (i, j), v in _split_degree(tr.current.fx, d).items():
            H[index[(i, j, 0)]] = v
        for (i, j), v in _split_degree(tr.current.fy, d).items():
            H[index[(i, j, 1)]] = v
        if all(v == 0 for v in H):
            continue
        rows = [[cols[cidx][r] for cidx in range(len(basis))] for r in range(len(basis))]
        sol = _solve_linear(rows, H)
        hx = {(i, j): v for (i, j, comp), v in zip(basis, sol) if comp == 0 and v != 0}
        hy = {(i, j): v for (i, j, comp), v in zip(basis, sol) if comp == 1 and v != 0}
        tr.pull(_near_identity(hx, hy, N))


def _eigvec(A, lam):
    (a, b), (c, d) = A
    if b != 0:
        return (b, lam - a)
    if c != 0:
        return (lam - d, c)
    # A is diagonal
    return (mpq(1), mpq(0)) if a == lam else (mpq(0), mpq(1))


def _linear_change(P, N) -> CoordinateChange:
    (p11, p12), (p21, p22) = P
    return CoordinateChange.linear(p11, p12, p21, p22, N)


def _diagonalize(tr: _Tracker, A, lx, ly):
    """Linear change putting eigenvalue lx on x and ly on y (lx != ly)."""
    vx, vy = _eigvec(A, lx), _eigvec(A, ly)
    if lx == ly:
        vx, vy = (mpq(1), mpq(0)), (mpq(0), mpq(1))
    tr.pull(_linear_change(((vx[0], vy[0]), (vx[1], vy[1])), tr.current.order))


def _normalize_1d(V: TruncatedSeries1, W: TruncatedSeries1, k: int) -> TruncatedSeries1:
    """ψ tangent to identity with V(ψ(w)) = ψ'(w)·W(w).

    V and W must share the leading term a·w^(k+1) and the residue of dw/V;
    the coefficient ψ_(k+1) is free and set to zero.
    """
    N = V.order
    a = V[k + 1]
    psi = TruncatedSeries1.var(N)
    for n in range(2, N - k + 1):
        if n == k + 1:
            continue
        E = compose1(V, psi) - psi.derive() * W
        e = E[n + k]
        if e != 0:
            c = list(psi.coeffs)
            c[n] = c[n] - e / (a * (k + 1 - n))
            psi = TruncatedSeries1(N, c)
    return psi


def _rescale_leading(coef, k: int, what: str):
    """s with s^k = 1/coef, exact in Q(i)."""
    s = exact_root(1 / coef, k)
    if s is None:
        raise IrrationalScaling(f"normalizing {what} needs a {k}-th root of {format_coeff(1 / coef)}")
    return s


# ---------------------------------------------------------------------------
# 1-D linearization


def linearize_1d(g: TruncatedSeries1) -> TruncatedSeries1:
    """φ with φ(0) = 0, φ'(0) = 1 and φ'(y)·y·g(y) = g(0)·φ(y).

    Closed form φ(y) = y·exp(∫₀^y (g(0)/g(s) − 1)/s ds).

    Raises
    ------
    ZeroLinearCoefficient
        If g(0) = 0.
    """
    g0 = g[0]
    if g0 == 0:
        raise ZeroLinearCoefficient("g(0) = 0: y·g(y)∂y has no linear part")
    N = g.order
    h = ((g.inverse() * g0) - 1).shift_down(1)
    return h.integrate().with_order(N).exp().shift_up(1)


# ---------------------------------------------------------------------------
# named forms


@dataclass(frozen=True)
class NamedForm:
    """A named normal form and its parameters (series, scalars, integers)."""

    variant: str
    params: dict = field(default_factory=dict)

    def field(self, order: int) -> PlanarVectorField:
        return make_named(self.variant, order, **self.params)

    def __eq__(self, other):
        if not isinstance(other, NamedForm):
            return NotImplemented
        return self.variant == other.variant and self.params == other.params

    __hash__ = None

    def __str__(self):
        inner = ", ".join(f"{k}={_fmt_param(v)}" for k, v in self.params.items())
        return f"{self.variant}({inner})"

    def to_dict(self):
        return {"variant": self.variant, "params": {k: _fmt_param(v) for k, v in self.params.items()}}


def _fmt_param(v):
    if isinstance(v, (TruncatedSeries1, TruncatedSeries2)):
        return str(v).replace("t", "y") if isinstance(v, TruncatedSeries1) else str(v)
    if isinstance(v, int):
        return str(v)
    return format_coeff(v)


def _series1(f, order):
    if isinstance(f, TruncatedSeries1):
        return f.with_order(order) if f.order != order else f
    if isinstance(f, (list, tuple)):
        return TruncatedSeries1(order, f)
    return TruncatedSeries1.constant(f, order)


def make_named(variant: str, order: int, **p) -> PlanarVectorField:
    """Exact field of a named form.

    Parameters per variant: ``Ecalle1(f)``, ``Ecalle2(f)`` with f(0) = 0,
    ``Saddle(f, mu)`` with f(0) = 1, ``Brjuno(f, n)`` with f(0) = μ ≠ ...,
    ``FormalModel(k, mu)``, ``PDNode(lam, k)``, ``PDLinear(l1, l2)``,
    ``PDFocus(a, b)``, ``PDResonantSaddle(p, q, k, mu)``, ``PDSaddleNode(k, mu)``.
    """
    N = order
    X, Y = TruncatedSeries2.x(N), TruncatedSeries2.y(N)
    if variant in (ECALLE1, ECALLE2):
        f = _series1(p["f"], N)
        if variant == ECALLE2 and f[0] != 0:
            raise ConstraintViolated("f(0) = 0", module="normal_forms")
        return PlanarVectorField(X * X, Y + X * TruncatedSeries2.from_1d(f, "y"))
    if variant == SADDLE:
        f = _series1(p["f"], N)
        if f[0] != 1:
            raise ConstraintViolated("f(0) = 1", module="normal_forms")
        mu = p["mu"]
        return PlanarVectorField(-X, (TruncatedSeries2.from_1d(f, "y") + X) * Y * mu)
    if variant == BRJUNO:
        f = _series1(p["f"], N)
        n = int(p["n"])
        if n < 0:
            raise ConstraintViolated("n >= 0", module="normal_forms")
        w = X ** n * Y
        arg = TruncatedSeries2.zero(N)
        for j, c in enumerate(f.coeffs):
            if c != 0:
                arg = arg + w ** j * c
        return PlanarVectorField(X * X, Y + X * Y * arg)
    if variant == FORMAL_MODEL:
        k, mu = int(p["k"]), p["mu"]
        if k < 1:
            raise ConstraintViolated("k >= 1", module="normal_forms")
        return PlanarVectorField(X ** (k + 1), Y + X ** k * Y * mu)
    if variant == PD_NODE:
        lam, k = p["lam"], int(p["k"])
        if k < 1 or lam == 0:
            raise ConstraintViolated("k >= 1 and λ ≠ 0", module="normal_forms")
        return PlanarVectorField((X * k + Y ** k) * lam, Y * lam)
    if variant == PD_LINEAR:
        return PlanarVectorField(X * p["l1"], Y * p["l2"])
    if variant == PD_FOCUS:
        a, b = p["a"], p["b"]
        return PlanarVectorField(X * a - Y * b, X * b + Y * a)
    if variant == PD_RESONANT_SADDLE:
        pp, qq, k, mu = int(p["p"]), int(p["q"]), int(p["k"]), p["mu"]
        if pp < 1 or qq < 1 or k < 1:
            raise ConstraintViolated("p, q, k >= 1", module="normal_forms")
        u = X ** pp * Y ** qq
        uk = u ** k
        return PlanarVectorField(X * qq, -(uk * mu * uk + uk + pp) * Y)
    if variant == PD_SADDLE_NODE:
        k, mu = int(p["k"]), p["mu"]
        if k < 1:
            raise ConstraintViolated("k >= 1", module="normal_forms")
        yk = Y ** k
        return PlanarVectorField(X, (yk + yk * yk * mu) * Y)
    raise ValueError(f"unknown variant {variant!r}")


def _only(s: TruncatedSeries2, allowed) -> bool:
    return all(allowed(i, j) for (i, j) in s._terms)


def _single(s: TruncatedSeries2, key, value=1) -> bool:
    return s._terms == {key: value}


def _rec_formal(X):
    t = X.fx._terms
    if len(t) != 1:
        return None
    (i, j), c = next(iter(t.items()))
    if j != 0 or i < 2 or c != 1:
        return None
    k = i - 1
    fy = X.fy._terms
    if fy.get((0, 1)) != 1 or not set(fy) <= {(0, 1), (k, 1)}:
        return None
    return NamedForm(FORMAL_MODEL, {"k": k, "mu": fy.get((k, 1), mpq(0))})


def _rec_ecalle(X):
    if not _single(X.fx, (2, 0)):
        return None
    fy = X.fy._terms
    if fy.get((0, 1)) != 1 or not all(k == (0, 1) or k[0] == 1 for k in fy):
        return None
    N = X.order
    f = TruncatedSeries1(max(N - 1, 0), [fy.get((1, j), 0) for j in range(N)])
    if f[0] == 0:
        return NamedForm(ECALLE2, {"f": f})
    return NamedForm(ECALLE1, {"f": f})


def _rec_brjuno(X):
    if not _single(X.fx, (2, 0)):
        return None
    fy = dict(X.fy._terms)
    if fy.pop((0, 1), None) != 1:
        return None
    # remaining terms x·y·(x^n y)^j = x^(1+nj) y^(1+j)
    if not all(i >= 1 and j >= 1 for (i, j) in fy):
        return None
    higher = sorted((j - 1, i - 1) for (i, j) in fy if j >= 2)
    n = None
    for jj, ii in higher:
        if ii % jj:
            return None
        cand = ii // jj
        if n is None:
            n = cand
        elif n != cand:
            return None
    if n is None:
        return None  # only x·y: a formal model
    for (i, j) in fy:
        if i - 1 != n * (j - 1):
            return None
    N = X.order
    J = (N - 2) // (n + 1)
    f = TruncatedSeries1(J, [fy.get((1 + n * j, 1 + j), 0) for j in range(J + 1)])
    return NamedForm(BRJUNO, {"f": f, "n": n})


def _rec_saddle(X):
    if not _single(X.fx, (1, 0), -1):
        return None
    fy = X.fy._terms
    mu = fy.get((1, 1))
    if mu is None or fy.get((0, 1)) != mu:
        return None
    if not all(k == (1, 1) or k[0] == 0 for k in fy):
        return None
    N = X.order
    f = TruncatedSeries1(N - 1, [fy.get((0, j + 1), 0) / mu for j in range(N)])
    return NamedForm(SADDLE, {"f": f, "mu": mu})


def _rec_pd_saddle_node(X):
    if not _single(X.fx, (1, 0)):
        return None
    fy = X.fy._terms
    if not fy or not all(i == 0 for (i, _) in fy):
        return None
    js = sorted(j for (_, j) in fy)
    k = js[0] - 1
    if k < 1 or fy[(0, k + 1)] != 1 or not set(js) <= {k + 1, 2 * k + 1}:
        return None
    return NamedForm(PD_SADDLE_NODE, {"k": k, "mu": fy.get((0, 2 * k + 1), mpq(0))})


def _rec_pd_resonant_saddle(X):
    fx = X.fx._terms
    if len(fx) != 1 or (1, 0) not in fx:
        return None
    q = fx[(1, 0)]
    if q.__class__.__name__ == "GaussianRational" or q.denominator != 1 or q < 1:
        return None
    fy = dict(X.fy._terms)
    p = -fy.pop((0, 1), 0)
    if p == 0 or p.__class__.__name__ == "GaussianRational" or p.denominator != 1 or p < 1:
        return None
    p, q = int(p), int(q)
    if not fy:
        return None
    # remaining: −(u^k + μ u^(2k))·y with u = x^p y^q
    keys = sorted(fy, key=lambda t: t[0])
    i0, j0 = keys[0]
    if i0 % p or (j0 - 1) % q or i0 // p != (j0 - 1) // q:
        return None
    k = i0 // p
    if fy[(i0, j0)] != -1 or k < 1:
        return None
    mu = -fy.get((2 * k * p, 2 * k * q + 1), 0)
    if not set(fy) <= {(k * p, k * q + 1), (2 * k * p, 2 * k * q + 1)}:
        return None
    return NamedForm(PD_RESONANT_SADDLE, {"p": p, "q": q, "k": k, "mu": mu})


def _rec_pd_node(X):
    fy = X.fy._terms
    if len(fy) != 1 or (0, 1) not in fy:
        return None
    lam = fy[(0, 1)]
    fx = dict(X.fx._terms)
    klam = fx.pop((1, 0), None)
    if klam is None or len(fx) != 1:
        return None
    (i, j), c = next(iter(fx.items()))
    if i != 0 or c != lam:
        return None
    k = j
    if klam != k * lam:
        return None
    return NamedForm(PD_NODE, {"lam": lam, "k": k})


def _rec_pd_focus(X):
    fx, fy = X.fx._terms, X.fy._terms
    if set(fx) != {(1, 0), (0, 1)} or set(fy) != {(1, 0), (0, 1)}:
        return None
    a, mb = fx[(1, 0)], fx[(0, 1)]
    b, a2 = fy[(1, 0)], fy[(0, 1)]
    if a != a2 or mb != -b:
        return None
    return NamedForm(PD_FOCUS, {"a": a, "b": b})


def _rec_pd_linear(X):
    fx, fy = X.fx._terms, X.fy._terms
    if not set(fx) <= {(1, 0)} or not set(fy) <= {(0, 1)} or not fx or not fy:
        return None
    return NamedForm(PD_LINEAR, {"l1": fx[(1, 0)], "l2": fy[(0, 1)]})


_RECOGNIZERS = (_rec_formal, _rec_ecalle, _rec_brjuno, _rec_saddle, _rec_pd_saddle_node,
                _rec_pd_resonant_saddle, _rec_pd_node, _rec_pd_focus, _rec_pd_linear)


def recognize_all(X: PlanarVectorField) -> list[NamedForm]:
    """Every named shape X matches exactly, most specific first."""
    out = []
    for rec in _RECOGNIZERS:
        r = rec(X)
        if r is not None:
            out.append(r)
    return out


def recognize(X: PlanarVectorField) -> Optional[NamedForm]:
    """Most specific named form matching X coefficientwise, or None."""
    if not X.singular_at_origin:
        return None
    found = recognize_all(X)
    return found[0] if found else None


def apply_homothety(form: NamedForm, c) -> NamedForm:
    """The form of the same foliation in the coordinate Y with y = c·Y."""
    v, p = form.variant, dict(form.params)
    if v in (ECALLE1, ECALLE2):
        f = p["f"]
        p["f"] = TruncatedSeries1(f.order, [a * c ** (n - 1) if n else a / c for n, a in enumerate(f.coeffs)])
    elif v in (BRJUNO, SADDLE):
        f = p["f"]
        p["f"] = TruncatedSeries1(f.order, [a * c ** n for n, a in enumerate(f.coeffs)])
    elif v == PD_SADDLE_NODE:
        raise ValueError("the saddle-node model is not stable under y -> c·y")
    return NamedForm(v, p)


def homothety_orbit_equal(A: NamedForm, B: NamedForm):
    """c with B = apply_homothety(A, c), or None.  c = 1 is preferred when it works."""
    if A.variant != B.variant:
        return None
    if A.variant not in (ECALLE1, ECALLE2, BRJUNO, SADDLE):
        return mpq(1) if A == B else None
    if {k: v for k, v in A.params.items() if k != "f"} != {k: v for k, v in B.params.items() if k != "f"}:
        return None
    fa, fb = A.params["f"], B.params["f"]
    n = min(fa.order, fb.order)
    # coefficient n of f transforms as a_n c^(e(n))
    if A.variant in (ECALLE1, ECALLE2):
        expo = lambda m: m - 1
    else:
        expo = lambda m: m
    cands = None
    for m in range(n + 1):
        a, b = fa[m], fb[m]
        if (a == 0) != (b == 0):
            return None
        if a == 0:
            continue
        e = expo(m)
        if e == 0:
            if a != b:
                return None
            continue
        if e < 0:
            roots = [a / b]
        else:
            roots = exact_roots(b / a, e)
        cands = roots if cands is None else [r for r in cands if r in roots]
        if not cands:
            return None
    if cands is None:
        return mpq(1)
    cands = sorted(cands, key=lambda r: (r != 1, -real_part(r), -imag_part(r)))
    for c in cands:
        if apply_homothety(A, c).params["f"] == fb:
            return c
    return None


# ---------------------------------------------------------------------------
# Dulac prenormalization


@dataclass
class DulacForm:
    """x^(k+1)∂x + y∂y + μx^k y∂y + x^(k+N) f(x, y)∂y with pullback(X, change) = unit · field."""

    k: int
    mu: Coefficient
    N: int
    remainder: TruncatedSeries2
    change: CoordinateChange
    unit: TruncatedSeries2
    linear_change: CoordinateChange

    def field(self) -> PlanarVectorField:
        order = self.remainder.order
        X = TruncatedSeries2.x(order)
        base = make_named(FORMAL_MODEL, order, k=self.k, mu=self.mu)
        return PlanarVectorField(base.fx, base.fy + X ** (self.k + self.N) * self.remainder)


def _saddle_node_linear(tr: _Tracker, zero_on: str):
    """Diagonalize the saddle-node linear part and divide by the nonzero eigenvalue."""
    ed = eigen_data(tr.current)
    lam = ed.lambda1
    A = ed.matrix
    if zero_on == "x":
        _diagonalize(tr, A, mpq(0), lam)
    else:
        _diagonalize(tr, A, lam, mpq(0))
    tr.divide(lam)


def _one_d_target(k, mu, N, lead=1):
    """lead · w^(k+1)/(1 + μ w^k)."""
    den = TruncatedSeries1(N, [1] + [0] * (k - 1) + [mu])
    return (TruncatedSeries1.var(N) ** (k + 1)).scale(lead) / den


def dulac_prenormalize(X: PlanarVectorField, N: int | None = None) -> DulacForm:
    """Formal invariants (k, μ) and a change to x^(k+1)∂x + y(1 + μx^k)∂y.

    All removable terms up to the truncation order are eliminated, so the
    returned remainder is zero mod truncation; ``N`` is the reduction depth the
    caller requires and is checked against the truncation order.

    Raises
    ------
    NotSaddleNode
        If X is not a saddle-node at the origin.
    TruncationTooShallow
        If the truncation order is below k + N + 2, or too low to see k.
    """
    cls = classify(X)
    if cls.variant != SADDLE_NODE:
        raise NotSaddleNode(f"class is {cls}")
    order = X.order
    tr = _Tracker(X)
    _saddle_node_linear(tr, zero_on="x")
    lin = tr.change
    _eliminate_diagonal(tr, mpq(0), mpq(1))
    cur = tr.current
    # now a(x)∂x + y b(x)∂y
    b = TruncatedSeries2.from_1d(cur.fy.coefficient_in("y", 1), "x")
    tr.divide(b)
    alpha = tr.current.fx.at_y0()
    v = alpha.valuation()
    if v == float("inf"):
        raise TruncationTooShallow("x-component vanishes to the truncation order; k not determined")
    k = int(v) - 1
    if N is None:
        N = max(order - k - 2, 0)
    if order < k + N + 2:
        raise TruncationTooShallow(f"truncation order {order} < k + N + 2 = {k + N + 2}")
    s = _rescale_leading(alpha[k + 1], k, "the x-coordinate")
    if s != 1:
        tr.pull(CoordinateChange.linear(s, 0, 0, 1, order))
        alpha = tr.current.fx.at_y0()
    if order < 2 * k + 1:
        raise TruncationTooShallow(f"μ needs truncation order >= 2k + 1 = {2 * k + 1}")
    mu = _residue_of_inverse(alpha, k)
    target = _one_d_target(k, mu, order)
    psi = _normalize_1d(alpha, target, k)
    tr.pull(CoordinateChange(TruncatedSeries2.from_1d(psi, "x"), TruncatedSeries2.y(order)))
    tr.multiply(TruncatedSeries2.from_1d(TruncatedSeries1(order, [1] + [0] * (k - 1) + [mu]), "x"))
    fy = tr.current.fy - make_named(FORMAL_MODEL, order, k=k, mu=mu).fy
    remainder = fy.divide_monomial(k + N, 0) if not fy.is_zero() else TruncatedSeries2.zero(order)
    return DulacForm(k, mu, N, remainder, tr.change, tr.unit, lin)


def pd_mu_to_dulac(mu):
    """μ of x∂x + (y^k + μy^(2k))y∂y as the μ of the swapped Dulac model (they differ by sign)."""
    return -mu


# ---------------------------------------------------------------------------
# Poincaré–Dulac normal forms


@dataclass
class FormalConjugacy:
    """pullback(source, change) = unit · target.field(order) modulo truncation."""

    change: CoordinateChange
    unit: TruncatedSeries2
    target: NamedForm
    linear_change: CoordinateChange
    source: PlanarVectorField

    def target_field(self) -> PlanarVectorField:
        return self.target.field(self.change.order)

    def residual(self) -> PlanarVectorField:
        lhs = pullback(self.source, self.change)
        return lhs - self.target_field() * self.unit

    def check(self) -> bool:
        r = self.residual()
        return r.fx.is_zero() and r.fy.is_zero()


def _nonresonant_or_node(tr: _Tracker, ed, cls) -> NamedForm:
    A = ed.matrix
    l1, l2 = ed.lambda1, ed.lambda2
    N = tr.current.order
    if cls.variant == RESONANT_NODE and l1 == l2 and not (A[0][1] == 0 and A[1][0] == 0):
        # Jordan block: linear part λ(x + y)∂x + λy∂y, then nothing resonant remains
        lam = l1
        Nm = ((A[0][0] - lam, A[0][1]), (A[1][0], A[1][1] - lam))
        v2 = (mpq(0), mpq(1)) if (Nm[0][1] != 0 or Nm[1][1] != 0) else (mpq(1), mpq(0))
        v1 = (Nm[0][0] * v2[0] + Nm[0][1] * v2[1], Nm[1][0] * v2[0] + Nm[1][1] * v2[1])
        tr.pull(_linear_change(((v1[0] / lam, v2[0]), (v1[1] / lam, v2[1])), N))
        _eliminate_general(tr, ((lam, lam), (mpq(0), lam)))
        return NamedForm(PD_NODE, {"lam": lam, "k": 1})
    if cls.variant == RESONANT_NODE and l1 != l2:
        # kλ on x, λ on y: the resonant monomial is y^k ∂x
        k = cls.params["k"]
        _diagonalize(tr, A, l2, l1)
        _eliminate_diagonal(tr, l2, l1)
        c = tr.current.fx.coeff(0, k)
        if c == 0:
            return NamedForm(PD_LINEAR, {"l1": l2, "l2": l1})
        t = c / l1
        tr.pull(CoordinateChange.linear(t, 0, 0, 1, N))
        return NamedForm(PD_NODE, {"lam": l1, "k": k})
    _diagonalize(tr, A, l1, l2)
    _eliminate_diagonal(tr, l1, l2)
    return NamedForm(PD_LINEAR, {"l1": l1, "l2": l2})


def _focus(tr: _Tracker, ed) -> NamedForm:
    A = ed.matrix
    a = ed.trace / 2
    lam = ed.lambda1 if imag_part(ed.lambda1) < 0 else ed.lambda2
    b = -imag_part(lam)
    v = _eigvec(A, lam)
    u = (real_part(v[0]), real_part(v[1]))
    w = (imag_part(v[0]), imag_part(v[1]))
    N = tr.current.order
    tr.pull(_linear_change(((u[0], w[0]), (u[1], w[1])), N))
    _eliminate_general(tr, ((a, -b), (b, a)))
    return NamedForm(PD_FOCUS, {"a": a, "b": b})


def _resonant_saddle(tr: _Tracker, ed, p: int, q: int) -> NamedForm:
    N = tr.current.order
    l1 = ed.lambda1
    _diagonalize(tr, ed.matrix, l1, ed.lambda2)
    tr.divide(l1 / q)  # linear part q x∂x − p y∂y
    _eliminate_diagonal(tr, mpq(q), mpq(-p))
    cur = tr.current
    # x A(u)∂x + y B(u)∂y, u = x^p y^q
    A1 = _resonant_profile(cur.fx, p, q, N, shift=(1, 0))
    B1 = _resonant_profile(cur.fy, p, q, N, shift=(0, 1))
    A_unit = substitute_u(A1.scale(mpq(1, q)), p, q, N)
    tr.divide(A_unit)
    C = B1.scale(q) / A1  # ẏ/y as a series in u
    Ct = -(C + p)  # ẏ/y = −(p + C̃(u))
    if Ct.is_zero():
        tr.divide(mpq(q))
        return NamedForm(PD_LINEAR, {"l1": mpq(1), "l2": mpq(-p, q)})
    k = int(Ct.valuation())
    if 2 * k * (p + q) + 1 > N:
        raise TruncationTooShallow(f"μ needs truncation order >= 2k(p+q) + 1 = {2 * k * (p + q) + 1}")
    # u' = −q u C̃(u); scale u by t = s^p r^q with s = t^α, r = t^β, αp + βq = 1
    alpha_, beta_ = _bezout(p, q)
    t = _rescale_leading(Ct[k], k, "the resonant monomial")
    sx = t ** alpha_ if alpha_ >= 0 else 1 / t ** (-alpha_)
    ry = t ** beta_ if beta_ >= 0 else 1 / t ** (-beta_)
    tr.pull(CoordinateChange.linear(sx, 0, 0, ry, N))
    Ct = TruncatedSeries1(Ct.order, [c * t ** n for n, c in enumerate(Ct.coeffs)])
    V = Ct.shift_up(1).scale(-q)
    # residue of dw/W for W = −q w^(k+1)(1 + μ w^k) is μ/q
    res = _residue_of_inverse(V, k)
    mu = res * q
    W = TruncatedSeries1(N, [0] * (k + 1) + [-q] + [0] * (k - 1) + [-q * mu])
    psi = _normalize_1d(V, W, k)
    # y = Y·S(w), S = (ψ(w)/w)^(1/q), w = x^p Y^q
    S = psi.shift_down(1).power(mpq(1, q))
    Sxy = substitute_u(S, p, q, N)
    Xs, Ys = TruncatedSeries2.x(N), TruncatedSeries2.y(N)
    tr.pull(CoordinateChange(Xs, Ys * Sxy))
    return NamedForm(PD_RESONANT_SADDLE, {"p": p, "q": q, "k": k, "mu": mu})


def _residue_of_inverse(V: TruncatedSeries1, k: int):
    """Res_0 dw/V(w) for V of valuation k+1."""
    unit = V.shift_down(k + 1)
    return residue(LaurentSlice(k + 1, unit.inverse()))


def _bezout(p: int, q: int):
    """(α, β) with αp + βq = 1."""
    old_r, r = p, q
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    return old_s, old_t


def _resonant_profile(s: TruncatedSeries2, p, q, N, shift) -> TruncatedSeries1:
    """Coefficients c_j of terms (shift)·u^j, u = x^p y^q, as a series in u."""
    a, b = shift
    c = [mpq(0)] * (N + 1)
    for (i, j), v in s._terms.items():
        ii, jj = i - a, j - b
        if ii < 0 or jj < 0 or ii % p or jj % q or ii // p != jj // q:
            raise AssertionError(f"non-resonant term x^{i} y^{j} left after elimination")
        c[ii // p] = v
    return TruncatedSeries1(N, c)


def substitute_u(f: TruncatedSeries1, p: int, q: int, N: int) -> TruncatedSeries2:
    """f(x^p y^q) as a bivariate series of order N."""
    return TruncatedSeries2(N, {(p * n, q * n): c for n, c in enumerate(f.coeffs) if n * (p + q) <= N})


def _saddle_node_pd(tr: _Tracker) -> NamedForm:
    N = tr.current.order
    _saddle_node_linear(tr, zero_on="y")
    _eliminate_diagonal(tr, mpq(1), mpq(0))
    cur = tr.current
    A = cur.fx.coefficient_in("x", 1)  # x A(y)∂x
    tr.divide(TruncatedSeries2.from_1d(A, "y"))
    V = tr.current.fy.at_x0()
    v = V.valuation()
    if v == float("inf"):
        raise TruncationTooShallow("central component vanishes to the truncation order; k not determined")
    k = int(v) - 1
    if N < 2 * k + 1:
        raise TruncationTooShallow(f"μ needs truncation order >= 2k + 1 = {2 * k + 1}")
    s = _rescale_leading(V[k + 1], k, "the y-coordinate")
    if s != 1:
        tr.pull(CoordinateChange.linear(1, 0, 0, s, N))
        V = tr.current.fy.at_x0()
    mu = -_residue_of_inverse(V, k)
    W = TruncatedSeries1(N, [0] * (k + 1) + [1] + [0] * (k - 1) + [mu])
    psi = _normalize_1d(V, W, k)
    tr.pull(CoordinateChange(TruncatedSeries2.x(N), TruncatedSeries2.from_1d(psi, "y")))
    return NamedForm(PD_SADDLE_NODE, {"k": k, "mu": mu})


def formal_normal_form(X: PlanarVectorField, order: int | None = None) -> FormalConjugacy:
    """Poincaré–Dulac normal form of X up to the truncation order.

    Targets: ``PDLinear`` (non-resonant, or no resonant term present),
    ``PDNode`` (resonant node with its resonant monomial), ``PDFocus`` (real
    fields with non-real eigenvalues), ``PDResonantSaddle`` with model
    q x∂x − (p + u^k + μu^(2k)) y∂y, u = x^p y^q, for eigenratio −p/q, and
    ``PDSaddleNode`` x∂x + (y^k + μy^(2k)) y∂y.  For the last two the unit
    factor is nontrivial (foliation normal forms).

    Raises
    ------
    UnsupportedClass
        Nilpotent, zero linear part, or regular point.
    IrrationalEigendata
        Eigenvalues outside Q(i): resonance cannot be decided exactly.
    """
    if order is not None and order != X.order:
        X = X.with_order(order)
    cls = classify(X)
    if cls.variant in (NILPOTENT, ZERO_LINEAR_PART, NON_SINGULAR):
        raise UnsupportedClass(f"no Poincaré–Dulac model for class {cls.variant}")
    ed = eigen_data(X)
    tr = _Tracker(X)
    if cls.variant == SADDLE_NODE:
        target = _saddle_node_pd(tr)
    elif not ed.exact:
        raise IrrationalEigendata("eigenvalues are not in Q(i)")
    elif cls.variant == RESONANT_SADDLE:
        target = _resonant_saddle(tr, ed, cls.params["p"], cls.params["q"])
    elif cls.variant == IRRATIONAL_SADDLE:
        raise IrrationalEigendata("irrational eigenratio")
    elif cls.variant == REAL_FOCUS:
        target = _focus(tr, ed)
    elif cls.variant in (POINCARE_NON_RESONANT, RESONANT_NODE):
        target = _nonresonant_or_node(tr, ed, cls)
    else:
        raise UnsupportedClass(cls.variant)
    lin = CoordinateChange.linear(*tr.change.linear_matrix()[0], *tr.change.linear_matrix()[1], X.order)
    return FormalConjugacy(tr.change, tr.unit, target, lin, X)
