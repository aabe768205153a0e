"""Linear-part eigendata and the Poincaré–Dulac taxonomy of planar singularities.

Eigenvalues are ordered canonically: ``lambda1`` is the nonzero eigenvalue of
smallest modulus (ties broken by larger real part, then larger imaginary
part), so the eigenratio ``lambda2/lambda1`` has modulus >= 1 and does not
depend on how the field is presented.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import mpmath
from gmpy2 import mpq

from .brjuno import BrjunoReport, QuadraticSurd, brjuno_report
from .coeffs import (
    Coefficient,
    exact_sqrt,
    format_coeff,
    imag_part,
    is_real,
    real_part,
    to_complex,
)
from .vfield import PlanarVectorField

__all__ = [
    "EigenData",
    "SingularityClass",
    "eigen_data",
    "classify",
    "es_resonance_check",
    "brjuno_report",
    "NON_SINGULAR",
    "POINCARE_NON_RESONANT",
    "RESONANT_NODE",
    "REAL_FOCUS",
    "IRRATIONAL_SADDLE",
    "RESONANT_SADDLE",
    "SADDLE_NODE",
    "NILPOTENT",
    "ZERO_LINEAR_PART",
]

NON_SINGULAR = "NonSingular"
POINCARE_NON_RESONANT = "PoincareNonResonant"
RESONANT_NODE = "ResonantNode"
REAL_FOCUS = "RealFocus"
IRRATIONAL_SADDLE = "IrrationalSaddle"
RESONANT_SADDLE = "ResonantSaddle"
SADDLE_NODE = "SaddleNode"
NILPOTENT = "Nilpotent"
ZERO_LINEAR_PART = "ZeroLinearPart"

Scalar = Union[Coefficient, QuadraticSurd, complex]


def _norm2(c):
    return real_part(c) ** 2 + imag_part(c) ** 2


def _sort_key_exact(c):
    return (_norm2(c), -real_part(c), -imag_part(c))


@dataclass(frozen=True)
class EigenData:
    """Eigendata of a 2×2 linear part ((a, b), (c, d)).

    ``lambda1``/``lambda2`` are exact coefficients when ``exact`` is set,
    otherwise complex floats.  ``ratio`` is exact (a coefficient or a real
    quadratic surd) whenever ``ratio_exact`` is set, even if the eigenvalues
    themselves are irrational.
    """

    a: Coefficient
    b: Coefficient
    c: Coefficient
    d: Coefficient
    lambda1: Scalar
    lambda2: Scalar
    exact: bool
    ratio: Optional[Scalar]
    ratio_exact: bool

    @property
    def trace(self):
        return self.a + self.d

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    @property
    def matrix(self):
        return ((self.a, self.b), (self.c, self.d))

    def ratio_complex(self) -> Optional[complex]:
        if self.ratio is None:
            return None
        if isinstance(self.ratio, QuadraticSurd):
            return complex(float(self.ratio))
        return to_complex(self.ratio) if not isinstance(self.ratio, complex) else self.ratio

    def to_dict(self):
        def show(v):
            if v is None:
                return None
            if isinstance(v, complex):
                return {"value": [v.real, v.imag], "provenance": "float"}
            return {"value": str(v) if isinstance(v, QuadraticSurd) else format_coeff(v), "provenance": "exact"}

        return {
            "matrix": [[format_coeff(self.a), format_coeff(self.b)], [format_coeff(self.c), format_coeff(self.d)]],
            "lambda1": show(self.lambda1),
            "lambda2": show(self.lambda2),
            "eigenratio": show(self.ratio),
        }


@dataclass(frozen=True)
class SingularityClass:
    """Variant name plus its parameters."""

    variant: str
    params: dict = field(default_factory=dict)
    brjuno: Optional[BrjunoReport] = None
    approximate: bool = False

    def __eq__(self, other):
        if not isinstance(other, SingularityClass):
            return NotImplemented
        return self.variant == other.variant and self.params == other.params

    def __hash__(self):
        return hash((self.variant, tuple(sorted(self.params.items()))))

    def __str__(self):
        if not self.params:
            return self.variant
        inner = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.variant}({inner})"

    def to_dict(self):
        out = {"variant": self.variant, "params": {k: str(v) for k, v in self.params.items()}}
        if self.brjuno is not None:
            out["brjuno"] = self.brjuno.to_dict()
        if self.approximate:
            out["approximate"] = True
        return out


def _order_pair(l1, l2):
    """(smallest-modulus nonzero, other) for exact eigenvalues."""
    if l1 == 0:
        return l2, l1
    if l2 == 0:
        return l1, l2
    return tuple(sorted((l1, l2), key=_sort_key_exact))


def _ratio_from_invariants(T, D):
    """Eigenratio r with |r| >= 1 from r + 1/r = T²/D − 2, exactly when possible."""
    sigma = T * T / D - 2
    delta = sigma * sigma - 4
    s = exact_sqrt(delta)
    if s is not None:
        cands = [(sigma + s) / 2, (sigma - s) / 2]
        cands = [c for c in cands if c != 0]
        cands.sort(key=lambda r: (-_norm2(r), -real_part(r), -imag_part(r)))
        return cands[0], True
    if is_real(sigma) and delta > 0:
        sign = 1 if sigma > 0 else -1
        return _surd(sigma, delta, sign), True
    return None, False


def _surd(sigma, delta, sign):
    # (σ + sign·√Δ)/2 with Δ = p/q rational: √Δ = √(p q)/q
    p, q = int(delta.numerator), int(delta.denominator)
    return QuadraticSurd(sigma / 2, mpq(sign, 2 * q), p * q)


def eigen_data(X: PlanarVectorField) -> EigenData:
    (a, b), (c, d) = X.linear_part()
    T = a + d
    D = a * d - b * c
    disc = T * T - 4 * D
    s = exact_sqrt(disc)
    if s is not None:
        l1, l2 = _order_pair((T + s) / 2, (T - s) / 2)
        ratio = None if l1 == 0 else l2 / l1
        return EigenData(a, b, c, d, l1, l2, True, ratio, ratio is not None)
    # irrational eigenvalues: high-precision approximations, exact ratio when possible
    with mpmath.workdps(50):
        Tc = _mpc(T)
        sq = mpmath.sqrt(_mpc(disc))
        e1, e2 = (Tc + sq) / 2, (Tc - sq) / 2
        l1, l2 = complex(e1), complex(e2)
    if abs(l1) > abs(l2) or (abs(l1) == abs(l2) and (l1.real, l1.imag) < (l2.real, l2.imag)):
        l1, l2 = l2, l1
    if D != 0:
        ratio, rex = _ratio_from_invariants(T, D)
        if ratio is None:
            ratio = l2 / l1
    else:
        ratio, rex = None, False
    return EigenData(a, b, c, d, l1, l2, False, ratio, rex)


def _mpc(c):
    r, i = real_part(c), imag_part(c)
    return mpmath.mpc(mpmath.mpf(int(r.numerator)) / int(r.denominator),
                      mpmath.mpf(int(i.numerator)) / int(i.denominator))


def _is_natural(r) -> bool:
    return not isinstance(r, (complex, QuadraticSurd)) and is_real(r) and r.denominator == 1 and r >= 1


def classify(X: PlanarVectorField, brjuno_budget: dict | None = None) -> SingularityClass:
    """Singularity class of X at the origin."""
    if not X.singular_at_origin:
        return SingularityClass(NON_SINGULAR)
    ed = eigen_data(X)
    (a, b), (c, d) = ed.matrix
    if a == 0 and b == 0 and c == 0 and d == 0:
        return SingularityClass(ZERO_LINEAR_PART)
    if ed.exact and ed.lambda1 == 0 and ed.lambda2 == 0:
        return SingularityClass(NILPOTENT)
    if ed.det == 0:
        return SingularityClass(SADDLE_NODE)
    r = ed.ratio
    if ed.ratio_exact:
        if isinstance(r, QuadraticSurd):
            if float(r) < 0:
                budget = brjuno_budget or {}
                report = brjuno_report(-r, **budget)
                return SingularityClass(IRRATIONAL_SADDLE, {"verdict": report.verdict, "ratio": r}, brjuno=report)
        elif is_real(r) and r < 0:
            r = -r
            return SingularityClass(RESONANT_SADDLE, {"p": int(r.numerator), "q": int(r.denominator)})
        elif _is_natural(r):
            return SingularityClass(RESONANT_NODE, {"k": int(r)})
    approximate = not ed.ratio_exact
    if _real_focus(X, ed):
        b_part = abs(imag_part(ed.lambda1)) if ed.exact else abs(complex(ed.lambda1).imag)
        return SingularityClass(REAL_FOCUS, {"a": ed.trace / 2, "b": b_part}, approximate=not ed.exact)
    return SingularityClass(POINCARE_NON_RESONANT, approximate=approximate)


def _real_focus(X, ed: EigenData) -> bool:
    if not X.is_real():
        return False
    T, D = ed.trace, ed.det
    if T * T - 4 * D >= 0:
        return False
    return T != 0


def es_resonance_check(s, mu: Coefficient, m_max: int, n_max: int | None = None) -> list[tuple[int, int]]:
    """Pairs (m, n) of E_s with m + μn ∈ −ℕ, for m ≤ m_max and n ≤ n_max.

    E_s = {(m, n) : n > 0, n/s + 1 ≤ m < n/s + 2}; ``s`` is a positive
    rational or ``"inf"``.  ``n_max`` defaults to ``m_max``.
    """
    n_max = m_max if n_max is None else n_max
    inf = s in ("inf", float("inf")) or s is None
    if not inf:
        s = mpq(s)
        if s <= 0:
            raise ValueError("slope must be positive")
    out = []
    for n in range(1, n_max + 1):
        lo = mpq(1) if inf else mpq(n) / s + 1
        hi = mpq(2) if inf else mpq(n) / s + 2
        m = int(-((-lo.numerator) // lo.denominator))  # ceil
        while m < hi and m <= m_max:
            v = m + mu * n
            if is_real(v) and v.denominator == 1 and v <= 0:
                out.append((m, n))
            m += 1
    return out
