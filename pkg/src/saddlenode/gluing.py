"""Flow-box normalizers for a foliation tangent to the vertical fibration along an
axis leaf, and the ω invariant of a pair of foliations sharing a leaf.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .coeffs import Coefficient
from .errors import ConstraintViolated, VanishingG
from .series import TruncatedSeries1, TruncatedSeries2
from .vfield import CoordinateChange, PlanarVectorField

__all__ = [
    "FoliationWithAxisLeaf",
    "OmegaInvariant",
    "flowbox_normalize",
    "flowbox_normalize_field",
    "solve_axis_fixing_change",
    "axis_restriction",
    "omega_invariant",
]


@dataclass(frozen=True)
class FoliationWithAxisLeaf:
    """F = y + y^k·x·f(x, y) (``function``) or X = f(x, y)∂x + y^k∂y (``field``)."""

    f: TruncatedSeries2
    k: int
    presentation: str = "function"

    def __post_init__(self):
        if self.k < 1:
            raise ConstraintViolated("k >= 1", module="gluing")
        if self.f.constant_term == 0:
            raise ConstraintViolated("f(0,0) ≠ 0", module="gluing")
        if self.presentation not in ("function", "field"):
            raise ValueError("presentation is 'function' or 'field'")

    @property
    def order(self) -> int:
        return self.f.order

    def function(self) -> TruncatedSeries2:
        N = self.order
        X, Y = TruncatedSeries2.x(N), TruncatedSeries2.y(N)
        return Y + Y ** self.k * X * self.f

    def field(self) -> PlanarVectorField:
        return PlanarVectorField(self.f, TruncatedSeries2.y(self.order) ** self.k)

    def model_function(self) -> TruncatedSeries2:
        N = self.order
        X, Y = TruncatedSeries2.x(N), TruncatedSeries2.y(N)
        return Y + X * Y ** self.k

    def model_field(self) -> PlanarVectorField:
        N = self.order
        return PlanarVectorField(TruncatedSeries2.one(N), TruncatedSeries2.y(N) ** self.k)


def flowbox_normalize(F: FoliationWithAxisLeaf) -> CoordinateChange:
    """Φ₀ = (x·f(x, y), y), so that F = F₀ ∘ Φ₀ with F₀ = y + x·y^k.

    Φ₀ sends the coordinates of F to those of F₀ (compose2(F₀, *Φ₀) = F).
    """
    if F.presentation != "function":
        raise ConstraintViolated("function presentation", module="gluing")
    N = F.order
    return CoordinateChange(TruncatedSeries2.x(N) * F.f, TruncatedSeries2.y(N))


def solve_axis_fixing_change(F: TruncatedSeries2, k: int) -> TruncatedSeries2:
    """φ̃ with F₀(x·φ̃, y) = F, from the function alone.

    F₀(x φ̃, y) = y + x φ̃ y^k, so φ̃ = (F − y)/(x y^k); raises if F is not of
    the form y + x·y^k·(unit).
    """
    rest = F - TruncatedSeries2.y(F.order)
    phi = rest.divide_monomial(1, k)
    if phi.constant_term == 0:
        raise ConstraintViolated("contact order exactly k along y = 0", module="gluing")
    return phi


def axis_restriction(change: CoordinateChange) -> TruncatedSeries1:
    """x ↦ first component of the change on the horizontal axis {y = 0}."""
    return change.u.at_y0()


def _solve_transport(f: TruncatedSeries2, k: int, initial: TruncatedSeries1) -> TruncatedSeries2:
    """φ with f·φ_x + y^k·φ_y = 1 and φ(0, y) = initial(y).

    Writing φ = Σ a_i(y) x^i and f = Σ f_m(y) x^m, the coefficient of x^i gives
    (i+1) f_0 a_(i+1) = δ_(i,0) − y^k a_i' − Σ_(m≥1) (i+1−m) f_m a_(i+1−m).
    """
    N = f.order
    fm = [f.coefficient_in("x", m) for m in range(N + 1)]
    inv_f0 = fm[0].inverse()
    a = [initial] + [TruncatedSeries1.zero(N) for _ in range(N)]
    yk = TruncatedSeries1.var(N) ** k
    for i in range(N):
        rhs = TruncatedSeries1.zero(N) - yk * a[i].derive()
        if i == 0:
            rhs = rhs + 1
        for m in range(1, i + 1):
            if not fm[m].is_zero():
                rhs = rhs - fm[m] * a[i + 1 - m] * (i + 1 - m)
        a[i + 1] = (rhs * inv_f0).scale(mpq(1, i + 1))
    terms = {}
    for i, ai in enumerate(a):
        for j, c in enumerate(ai.coeffs):
            if c != 0 and i + j <= N:
                terms[(i, j)] = c
    return TruncatedSeries2(N, terms)


def flowbox_normalize_field(X: FoliationWithAxisLeaf, fix_axis: bool = True,
                            initial: TruncatedSeries1 | None = None) -> CoordinateChange:
    """Φ = (φ(x, y), y) with Φ_*X = ∂x + y^k∂y, i.e. f·φ_x + y^k·φ_y = 1.

    With ``fix_axis`` the change fixes the vertical transversal pointwise,
    φ(0, y) = 0 (so φ = x·φ̃, the unique such normalizer); otherwise φ(0, y) is
    taken from ``initial``.  Φ maps old coordinates to new ones, so
    ``pullback(X₀, Φ) = X``; on the axis φ(x, 0) = ∫₀ˣ dζ/f(ζ, 0).

    The transport equation involves φ_x, so for an order-N input the identity
    holds modulo degree N (compare at order N − 1).
    """
    if X.presentation != "field":
        raise ConstraintViolated("field presentation", module="gluing")
    N = X.order
    if fix_axis or initial is None:
        init = TruncatedSeries1.zero(N)
    else:
        if initial[0] != 0:
            raise ConstraintViolated("initial(0) = 0", module="gluing")
        init = initial.with_order(N)
    phi = _solve_transport(X.f, X.k, init)
    return CoordinateChange(phi, TruncatedSeries2.y(N))


@dataclass(frozen=True)
class OmegaInvariant:
    """ω = density(t)·dx along the common leaf, t = x − base_point.

    density = g(x, 0)·exp((k−1)∫_{x₀}^x f(ζ, 0) dζ).
    """

    density: TruncatedSeries1
    base_point: Coefficient
    k: int

    def integral(self, x1) -> Coefficient:
        """∫_{x₀}^{x₁} ω (exact for the polynomial representative)."""
        return self.density.integrate().evaluate(x1 - self.base_point)

    def ratio_is_constant(self, other: "OmegaInvariant") -> bool:
        """True if the two densities are proportional (same invariant up to base point)."""
        a, b = self.density, other.density
        n = min(a.order, b.order)
        if a[0] == 0 or b[0] == 0:
            return False
        r = a[0] / b[0]
        return all(a[i] == r * b[i] for i in range(n + 1))


def _axis_coefficient(s: TruncatedSeries2, power: int) -> TruncatedSeries1:
    return s.coefficient_in("y", power)


def omega_invariant(X: PlanarVectorField, Y: PlanarVectorField, x0: Coefficient = 0,
                    k: int | None = None) -> OmegaInvariant:
    """ω for X = ∂x + y·f∂y and Y = X + y^k·g∂y, expanded around x₀.

    The density is returned as a series in t = x − x₀:
    g(x₀ + t, 0)·exp((k−1)∫₀ᵗ f(x₀ + s, 0) ds).  With this density the
    holonomy of Y from {x = x₀} to {x = x₁}, written in a coordinate in which
    X is ∂x, is y ↦ y + (∫_{x₀}^{x₁} ω)·y^k + … for k ≥ 2; for k = 1 the same
    integral is the logarithm of the relative multiplier.

    Raises
    ------
    VanishingG
        If g(x₀, 0) = 0.
    """
    N = X.order
    if X.fx != TruncatedSeries2.one(N):
        raise ConstraintViolated("X = ∂x + y f ∂y", module="gluing")
    if X.fy.y_valuation() < 1:
        raise ConstraintViolated("{y = 0} invariant for X", module="gluing")
    D = Y - X
    if not D.fx.is_zero():
        raise ConstraintViolated("Y − X is vertical", module="gluing")
    if k is None:
        v = D.fy.y_valuation()
        if v == float("inf"):
            raise VanishingG("Y = X")
        k = int(v)
    if D.fy.y_valuation() < k:
        raise ConstraintViolated(f"Y − X divisible by y^{k}", module="gluing")
    f0 = _axis_coefficient(X.fy, 1)
    g0 = _axis_coefficient(D.fy, k)
    if x0 != 0:
        f0 = f0.taylor_shift(x0)
        g0 = g0.taylor_shift(x0)
    if g0[0] == 0:
        raise VanishingG("g(x₀, 0) = 0")
    expo = f0.integrate().with_order(f0.order).scale(k - 1)
    density = g0 * expo.exp()
    return OmegaInvariant(density, x0, k)
