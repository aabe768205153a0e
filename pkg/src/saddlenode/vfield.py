"""Planar vector fields, coordinate changes and their elementary invariants.

A field ``X = fx ∂x + fy ∂y`` is a pair of :class:`TruncatedSeries2` of the
same truncation order.  A :class:`CoordinateChange` ``Φ = (u, v)`` expresses
the old coordinates in terms of new ones, ``(x, y) = Φ(X, Y)``; the field in
the new coordinates is the pullback ``Φ*X = DΦ⁻¹ · X∘Φ``.
"""

from __future__ import annotations

from dataclasses import dataclass


from .coeffs import Coefficient, format_coeff
from .errors import (
    AxisNotInvariant,
    ConstraintViolated,
    NonUnitFactor,
    NotPolynomialInX,
    SingularLinearPart,
    TruncationMismatch,
    ZeroAxisComponent,
)
from .series import (
    LaurentSlice,
    TruncatedSeries1,
    TruncatedSeries2,
    compose2,
    invert_series_pair,
    residue,
)

__all__ = [
    "PlanarVectorField",
    "RationalInXField",
    "CoordinateChange",
    "CSIndex",
    "pullback",
    "is_axis_invariant",
    "multiply_by_unit",
    "chart_at_infinity",
    "contact_order",
    "camacho_sad_index",
    "reduce_preparation",
    "determinant",
    "colinear",
]

AXES = ("y=0", "x=0")


class PlanarVectorField:
    """X = fx·∂x + fy·∂y with components of a shared truncation order."""

    __slots__ = ("fx", "fy")

    def __init__(self, fx: TruncatedSeries2, fy: TruncatedSeries2):
        if fx.order != fy.order:
            raise TruncationMismatch(f"component orders differ: {fx.order} vs {fy.order}")
        self.fx = fx
        self.fy = fy

    @classmethod
    def from_terms(cls, order: int, fx: dict, fy: dict) -> "PlanarVectorField":
        return cls(TruncatedSeries2(order, fx), TruncatedSeries2(order, fy))

    @property
    def order(self) -> int:
        return self.fx.order

    @property
    def singular_at_origin(self) -> bool:
        return self.fx.constant_term == 0 and self.fy.constant_term == 0

    def linear_part(self):
        """Matrix ((a, b), (c, d)) with fx ≈ a x + b y, fy ≈ c x + d y."""
        return (
            (self.fx.coeff(1, 0), self.fx.coeff(0, 1)),
            (self.fy.coeff(1, 0), self.fy.coeff(0, 1)),
        )

    def components(self):
        return self.fx, self.fy

    def is_real(self) -> bool:
        return self.fx.is_real() and self.fy.is_real()

    def with_order(self, order: int) -> "PlanarVectorField":
        return PlanarVectorField(self.fx.with_order(order), self.fy.with_order(order))

    def swap(self) -> "PlanarVectorField":
        """Exchange the roles of x and y."""
        def sw(s):
            return TruncatedSeries2._raw(s.order, {(j, i): c for (i, j), c in s._terms.items()})
        return PlanarVectorField(sw(self.fy), sw(self.fx))

    def scale(self, c) -> "PlanarVectorField":
        return PlanarVectorField(self.fx.scale(c), self.fy.scale(c))

    def __mul__(self, h):
        if isinstance(h, TruncatedSeries2):
            return PlanarVectorField(self.fx * h, self.fy * h)
        return self.scale(h)

    __rmul__ = __mul__

    def __add__(self, other: "PlanarVectorField"):
        return PlanarVectorField(self.fx + other.fx, self.fy + other.fy)

    def __sub__(self, other: "PlanarVectorField"):
        return PlanarVectorField(self.fx - other.fx, self.fy - other.fy)

    def __neg__(self):
        return PlanarVectorField(-self.fx, -self.fy)

    def __eq__(self, other):
        if not isinstance(other, PlanarVectorField):
            return NotImplemented
        return self.fx == other.fx and self.fy == other.fy

    __hash__ = None

    def apply(self, h: TruncatedSeries2) -> TruncatedSeries2:
        """Lie derivative X(h) of a function (polynomial-representative semantics)."""
        return self.fx * h.derive("x") + self.fy * h.derive("y")

    def __repr__(self):
        return f"PlanarVectorField(order={self.order}, {self})"

    def __str__(self):
        return f"({self.fx})*dx + ({self.fy})*dy"


def determinant(X1: PlanarVectorField, X2: PlanarVectorField) -> TruncatedSeries2:
    """det(X1, X2) = fx1·fy2 − fy1·fx2."""
    return X1.fx * X2.fy - X1.fy * X2.fx


def colinear(X1: PlanarVectorField, X2: PlanarVectorField) -> bool:
    """Same foliation test: det(X1, X2) ≡ 0 mod truncation."""
    return determinant(X1, X2).is_zero()


@dataclass(frozen=True)
class RationalInXField:
    """X = (f0 + f1 x + f2 x² + f3 x³)/(g0 + g1 x)·∂x + ∂y with fi, gj series in y."""

    f0: TruncatedSeries1
    f1: TruncatedSeries1
    f2: TruncatedSeries1
    f3: TruncatedSeries1
    g0: TruncatedSeries1
    g1: TruncatedSeries1

    def __post_init__(self):
        orders = {s.order for s in (self.f0, self.f1, self.f2, self.f3, self.g0, self.g1)}
        if len(orders) != 1:
            raise TruncationMismatch("all coefficient series must share one order")
        if self.g0.is_zero() and self.g1.is_zero():
            raise ValueError("g0 and g1 cannot both vanish identically")

    @property
    def order(self) -> int:
        return self.f0.order

    def foliation_field(self) -> PlanarVectorField:
        """Polynomial representative (f0 + … + f3 x³)∂x + (g0 + g1 x)∂y of the foliation."""
        N = self.order
        X = TruncatedSeries2.x(N)
        num = TruncatedSeries2.zero(N)
        for p, fi in enumerate((self.f0, self.f1, self.f2, self.f3)):
            num = num + TruncatedSeries2.from_1d(fi, "y") * X ** p
        den = TruncatedSeries2.from_1d(self.g0, "y") + TruncatedSeries2.from_1d(self.g1, "y") * X
        return PlanarVectorField(num, den)


class CoordinateChange:
    """Φ = (u, v): old coordinates as series in the new ones, Φ(0) = 0, DΦ(0) invertible."""

    __slots__ = ("u", "v", "_inverse")

    def __init__(self, u: TruncatedSeries2, v: TruncatedSeries2):
        if u.order != v.order:
            raise TruncationMismatch("component orders differ")
        if u.constant_term != 0 or v.constant_term != 0:
            from .errors import NonVanishingShift

            raise NonVanishingShift("coordinate change must fix the origin")
        (a, b), (c, d) = self.linear_matrix_of(u, v)
        if a * d - b * c == 0:
            raise SingularLinearPart("coordinate change has singular linear part")
        self.u = u
        self.v = v
        self._inverse = None

    @staticmethod
    def linear_matrix_of(u, v):
        return ((u.coeff(1, 0), u.coeff(0, 1)), (v.coeff(1, 0), v.coeff(0, 1)))

    @classmethod
    def identity(cls, order: int) -> "CoordinateChange":
        return cls(TruncatedSeries2.x(order), TruncatedSeries2.y(order))

    @classmethod
    def linear(cls, a, b, c, d, order: int) -> "CoordinateChange":
        """x = aX + bY, y = cX + dY."""
        X, Y = TruncatedSeries2.x(order), TruncatedSeries2.y(order)
        return cls(X * a + Y * b, X * c + Y * d)

    @classmethod
    def swap(cls, order: int) -> "CoordinateChange":
        return cls(TruncatedSeries2.y(order), TruncatedSeries2.x(order))

    @property
    def order(self) -> int:
        return self.u.order

    def linear_matrix(self):
        return self.linear_matrix_of(self.u, self.v)

    def is_identity(self) -> bool:
        N = self.order
        return self.u == TruncatedSeries2.x(N) and self.v == TruncatedSeries2.y(N)

    def is_tangent_to_identity(self) -> bool:
        return self.linear_matrix() == ((1, 0), (0, 1))

    def inverse(self) -> "CoordinateChange":
        if self._inverse is None:
            U, V = invert_series_pair(self.u, self.v)
            inv = CoordinateChange(U, V)
            inv._inverse = self
            self._inverse = inv
        return self._inverse

    def compose(self, other: "CoordinateChange") -> "CoordinateChange":
        """self ∘ other: first apply ``other`` then ``self`` (as maps new → old)."""
        return CoordinateChange(compose2(self.u, other.u, other.v), compose2(self.v, other.u, other.v))

    def __matmul__(self, other):
        return self.compose(other)

    def apply_to(self, f: TruncatedSeries2) -> TruncatedSeries2:
        """f ∘ Φ."""
        return compose2(f, self.u, self.v)

    def __eq__(self, other):
        if not isinstance(other, CoordinateChange):
            return NotImplemented
        return self.u == other.u and self.v == other.v

    __hash__ = None

    def __repr__(self):
        return f"CoordinateChange(x = {self.u}, y = {self.v})"


@dataclass(frozen=True)
class CSIndex:
    value: Coefficient
    curve: str = "y=0"

    def __str__(self):
        return f"CS[{self.curve}] = {format_coeff(self.value)}"


# ---------------------------------------------------------------------------


def pullback(X: PlanarVectorField, phi: CoordinateChange) -> PlanarVectorField:
    """Φ*X = DΦ⁻¹·(X∘Φ).

    Exact modulo truncation whenever X is singular at the origin; for regular
    X the Jacobian of the polynomial representative of Φ is used.
    """
    if X.order != phi.order:
        raise TruncationMismatch(f"field order {X.order} vs change order {phi.order}")
    u, v = phi.u, phi.v
    gx = compose2(X.fx, u, v)
    gy = compose2(X.fy, u, v)
    ux, uy = u.derive("x"), u.derive("y")
    vx, vy = v.derive("x"), v.derive("y")
    jac = ux * vy - uy * vx
    if jac.constant_term == 0:
        raise SingularLinearPart("Jacobian vanishes at the origin")
    inv = jac.inverse()
    return PlanarVectorField((vy * gx - uy * gy) * inv, (ux * gy - vx * gx) * inv)


def pushforward(X: PlanarVectorField, phi: CoordinateChange) -> PlanarVectorField:
    """Φ_*X = (Φ⁻¹)*X."""
    return pullback(X, phi.inverse())


def is_axis_invariant(X: PlanarVectorField, axis: str = "y=0") -> bool:
    """The component transverse to ``axis`` vanishes identically on it."""
    if axis == "y=0":
        return X.fy.at_y0().is_zero()
    if axis == "x=0":
        return X.fx.at_x0().is_zero()
    raise ValueError(f"unknown axis {axis!r}; expected one of {AXES}")


def multiply_by_unit(X: PlanarVectorField, h) -> PlanarVectorField:
    """h·X for a unit h (same foliation)."""
    if not isinstance(h, TruncatedSeries2):
        h = TruncatedSeries2.constant(h, X.order)
    if h.constant_term == 0:
        raise NonUnitFactor("factor vanishes at the origin")
    return X * h


def _x_slices(s: TruncatedSeries2) -> dict[int, dict]:
    rows: dict[int, dict] = {}
    for (i, j), c in s._terms.items():
        rows.setdefault(i, {})[j] = c
    return rows


def chart_at_infinity(X: PlanarVectorField, rescale: bool = True, max_x_degree: int = 3) -> PlanarVectorField:
    """The field in coordinates (x̃, y) = (1/x, y).

    With x = 1/x̃ one has dx̃/dt = −x̃² dx/dt.  With ``rescale`` the result is
    multiplied by the least power of x̃ (possibly negative) making it
    holomorphic and not divisible by x̃.

    Raises
    ------
    NotPolynomialInX
        If a component has x-degree above ``max_x_degree``; beyond that a
        truncated series cannot be told apart from a genuine power series.
    """
    N = X.order
    ax, by = _x_slices(X.fx), _x_slices(X.fy)
    deg = max(list(ax) + list(by) + [0])
    if deg > max_x_degree:
        raise NotPolynomialInX(f"x-degree {deg} exceeds {max_x_degree}")
    # x̃-exponents before rescaling: fx-part a_i x^i -> -a_i x̃^(2-i); fy-part b_i x̃^(-i)
    new_x: dict[tuple, Coefficient] = {}
    new_y: dict[tuple, Coefficient] = {}
    exps = [2 - i for i in ax] + [-i for i in by]
    shift = 0
    if rescale and exps:
        shift = -min(exps)
    elif exps and min(exps) < 0:
        raise NotPolynomialInX("field has a pole at x̃ = 0; use rescale=True")
    for i, row in ax.items():
        p = 2 - i + shift
        for j, c in row.items():
            new_x[(p, j)] = new_x.get((p, j), 0) - c
    for i, row in by.items():
        p = -i + shift
        for j, c in row.items():
            new_y[(p, j)] = new_y.get((p, j), 0) + c
    return PlanarVectorField(TruncatedSeries2(N, new_x), TruncatedSeries2(N, new_y))


def contact_order(X1: PlanarVectorField, X2: PlanarVectorField):
    """Order of vanishing at 0 of det(X1, X2); ``INFINITE`` when it vanishes identically."""
    return determinant(X1, X2).valuation()


def camacho_sad_index(X: PlanarVectorField, axis: str = "y=0") -> CSIndex:
    """Res_{0} (∂fy/∂y)(x,0) / fx(x,0) dx along the invariant axis {y=0} (or {x=0})."""
    if axis == "x=0":
        idx = camacho_sad_index(X.swap(), "y=0")
        return CSIndex(idx.value, "x=0")
    if axis != "y=0":
        raise ValueError(f"unknown axis {axis!r}")
    if not is_axis_invariant(X, "y=0"):
        raise AxisNotInvariant("{y=0} is not invariant")
    a = X.fx.at_y0()
    if a.is_zero():
        raise ZeroAxisComponent("fx vanishes identically on {y=0}")
    b = X.fy.derive("y").at_y0()
    m = a.valuation()
    unit = a.shift_down(m)
    return CSIndex(residue(LaurentSlice(m, b / unit)), "y=0")


def reduce_preparation(R: RationalInXField):
    """Bring a prepared field to the form x²∂x + y∂y + x f(y)∂y.

    Returns ``(X_f, change, unit)`` where ``change`` expresses the input
    coordinates in the output ones and
    ``pullback(R.foliation_field(), change) = unit · X_f`` mod truncation.

    The Möbius normalization is the one fixed by the constraints: {x = ∞} is
    the vertical leaf and {x = 0} the invariant curve; the remaining freedom is
    spent on the y-linearization and the x-rescale, so the output has
    f(0) = g1(0)/f2(0) · (nonzero).
    """
    from .normal_forms import linearize_1d

    for name, s in (("f0", R.f0), ("f1", R.f1), ("f3", R.f3)):
        if not s.is_zero():
            raise ConstraintViolated(f"{name} ≡ 0", module="vfield")
    if R.f2[0] == 0:
        raise ConstraintViolated("f2(0) ≠ 0", module="vfield")
    if R.g1[0] == 0:
        raise ConstraintViolated("g1(0) ≠ 0", module="vfield")
    if R.g0[0] != 0:
        raise ConstraintViolated("g0(0) = 0", module="vfield")
    if R.g0[1] == 0:
        raise ConstraintViolated("g0'(0) ≠ 0", module="vfield")
    N = R.order
    # x²∂x + (y G(y) + x h(y))∂y after division by f2
    G = (R.g0 / R.f2).shift_down(1)
    h = R.g1 / R.f2
    g0 = G[0]
    phi = linearize_1d(G)
    from .series import compose1, revert1

    phi_inv = revert1(phi)
    fhat = compose1(phi.derive() * h, phi_inv)
    Y = TruncatedSeries2.y(N)
    Xs = TruncatedSeries2.x(N)
    out = PlanarVectorField(Xs * Xs, Y + Xs * TruncatedSeries2.from_1d(fhat, "y"))
    u = Xs * g0
    v = TruncatedSeries2.from_1d(phi_inv, "y")
    change = CoordinateChange(u, v)
    unit = TruncatedSeries2.from_1d(R.f2, "y")
    unit = compose2(unit, u, v) * g0
    return out, change, unit
