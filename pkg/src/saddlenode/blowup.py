"""Quadratic blow-up in the two standard charts and the saddle-node cascade."""

from __future__ import annotations

from dataclasses import dataclass, field

from .classify import EigenData, SingularityClass, classify, eigen_data
from .errors import NonSingularInput, NotEcalle2
from .normal_forms import ECALLE2, FORMAL_MODEL, dulac_prenormalize, recognize_all
from .series import TruncatedSeries2
from .vfield import PlanarVectorField

__all__ = ["TCHART", "SCHART", "BlowupChart", "CascadeReport", "blow_up", "cascade", "multiplicity"]

TCHART = "TChart"  # y = t·x, coordinates (x, t), divisor {x = 0}
SCHART = "SChart"  # x = s·y, coordinates (s, y), divisor {y = 0}


@dataclass
class BlowupChart:
    chart: str
    field: PlanarVectorField
    exceptional_divisor: str
    rescale_power: int
    dicritical: bool = False

    @property
    def coordinates(self) -> tuple[str, str]:
        return ("x", "t") if self.chart == TCHART else ("s", "y")

    def divisor_invariant(self) -> bool:
        """Exact check that the exceptional divisor is a union of leaves (or zeros)."""
        if self.chart == TCHART:
            return self.field.fx.x_valuation() >= 1
        return self.field.fy.y_valuation() >= 1


@dataclass
class SingularPoint:
    location: str
    eigen: EigenData
    cls: SingularityClass
    mu: object = None  # Dulac invariant for saddle-nodes

    def to_dict(self):
        out = {"location": self.location, "class": self.cls.to_dict(), "eigen": self.eigen.to_dict()}
        if self.mu is not None:
            from .coeffs import format_coeff

            out["mu"] = {"value": format_coeff(self.mu), "provenance": "exact"}
        return out


@dataclass
class CascadeReport:
    steps: list = field(default_factory=list)
    singular_points: list = field(default_factory=list)

    def saddles(self) -> list[SingularPoint]:
        return [p for p in self.singular_points if p.cls.variant == "ResonantSaddle"]

    def saddle_nodes(self) -> list[SingularPoint]:
        return [p for p in self.singular_points if p.cls.variant == "SaddleNode"]

    def to_dict(self):
        return {
            "steps": [{"chart": s.chart, "field": str(s.field), "rescale_power": s.rescale_power,
                       "dicritical": s.dicritical} for s in self.steps],
            "singular_points": [p.to_dict() for p in self.singular_points],
        }


def multiplicity(X: PlanarVectorField) -> int:
    """Lowest total degree present in either component."""
    return int(min(X.fx.valuation(), X.fy.valuation()))


def _substitute_t(s: TruncatedSeries2, N: int) -> TruncatedSeries2:
    """s(x, t·x) as a series of order N (callers pass the working order)."""
    out = {}
    for (i, j), c in s._terms.items():
        if i + 2 * j <= N:
            out[(i + j, j)] = c
    return TruncatedSeries2(N, out)


def blow_up(X: PlanarVectorField, chart: str = TCHART) -> BlowupChart:
    """Blow up the origin and divide by x^(ν−1) (resp. y^(ν−1)), ν the multiplicity.

    In a non-dicritical situation x^(ν−1) is the largest power of the divisor
    dividing both components.  In a dicritical one the divisor consists of
    zeros of the transformed field before that division is pushed further;
    the chart is returned as is with ``dicritical`` set.
    """
    if not X.singular_at_origin:
        raise NonSingularInput("blow-up is centred at a singular point")
    if chart not in (TCHART, SCHART):
        raise ValueError(f"unknown chart {chart!r}")
    N = X.order
    Z = X.swap() if chart == SCHART else X
    nu = multiplicity(Z)
    if nu == float("inf"):
        raise NonSingularInput("zero field")
    # work at order N + ν: the division by x^ν brings those terms back to degree <= N
    W = N + int(nu)
    a = _substitute_t(Z.fx, W)
    b = _substitute_t(Z.fy, W)
    T = TruncatedSeries2.y(W)
    num = b - T * a  # x·ṫ = ẏ − t·ẋ
    dicritical = num.x_valuation() > nu
    out = PlanarVectorField(a.divide_monomial(nu - 1, 0).with_order(N), num.divide_monomial(nu, 0).with_order(N))
    if chart == SCHART:
        out = out.swap()
    divisor = "x=0" if chart == TCHART else "y=0"
    return BlowupChart(chart, out, divisor, nu - 1, dicritical)


def _only_origin_on_divisor(bc: BlowupChart) -> bool:
    """The tangential component restricted to the divisor vanishes only at 0."""
    if bc.chart == TCHART:
        r = bc.field.fy.at_x0()
    else:
        r = bc.field.fx.at_y0()
    v = r.valuation()
    return v != float("inf") and r.degree() == v


def cascade(X: PlanarVectorField, n: int) -> CascadeReport:
    """Blow up the saddle-node of an Ecalle2-form field n times.

    At every step the new saddle-node sits at the TChart origin and is blown
    up again; the SChart origin carries a saddle of eigenratio −1.

    Raises
    ------
    NotEcalle2
        If X does not have the shape x²∂x + (y + x f(y))∂y with f(0) = 0.
    """
    shapes = {f.variant for f in recognize_all(X)}
    if ECALLE2 not in shapes and not (FORMAL_MODEL in shapes and X.fx.coeff(2, 0) == 1):
        raise NotEcalle2("input is not of the form x²∂x + (y + x f(y))∂y with f(0) = 0")
    if n < 0:
        raise ValueError("n must be >= 0")
    report = CascadeReport()
    cur = X
    for step in range(1, n + 1):
        t_chart = blow_up(cur, TCHART)
        s_chart = blow_up(cur, SCHART)
        report.steps.extend([t_chart, s_chart])
        for bc in (t_chart, s_chart):
            if not _only_origin_on_divisor(bc):
                raise AssertionError(f"unexpected singular points on the divisor at step {step}")
        S = s_chart.field
        report.singular_points.append(
            SingularPoint(f"step {step}: SChart origin (s, y) = (0, 0)", eigen_data(S), classify(S)))
        cur = t_chart.field
    cls = classify(cur)
    mu = dulac_prenormalize(cur).mu if cls.variant == "SaddleNode" else None
    where = f"step {n}: TChart origin (x, t) = (0, 0)" if n else "input origin"
    report.singular_points.append(SingularPoint(where, eigen_data(cur), cls, mu))
    return report
