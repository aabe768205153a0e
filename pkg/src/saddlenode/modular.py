"""Martinet–Ramis data containers and the derivative of the modular map along the
family x²/(1+μx)∂x + y∂y + ε·f(x, y)·y∂y at ε = 0.

Branches: complex powers use the principal logarithm, so (−1)^(−μ) = e^(−iπμ)
and n^(μn−1) = e^((μn−1)·log n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import mpmath
from gmpy2 import mpq

from .coeffs import Coefficient, format_coeff, imag_part, is_real, real_part
from .errors import ConstraintViolated, PoleOfGamma

__all__ = [
    "MartinetRamisData",
    "ElizarovInput",
    "ElizarovOutput",
    "gamma_exact",
    "elizarov_derivative",
    "FORMAL",
    "NUMERIC",
    "UNKNOWN",
]

FORMAL = "Formal"
NUMERIC = "Numeric"
UNKNOWN = "Unknown"

DT_READING = "(-n)^m in the dt sum evaluated at n = -1 (factor 1)"
BRANCH = "principal logarithm"


@dataclass
class MartinetRamisData:
    """φ₀(ζ) = e^(2iπμ)ζ + Σ a_n ζ^n and φ_∞(ζ) = ζ + t."""

    mu: Coefficient
    phi0_jet: Optional[list] = None
    translation: Optional[object] = None
    provenance: dict = field(default_factory=lambda: {"mu": FORMAL, "phi0_jet": UNKNOWN, "translation": UNKNOWN})

    def multiplier(self) -> complex:
        return complex(mpmath.expjpi(2 * _mp(self.mu)))

    def has_central_manifold(self) -> Optional[bool]:
        """True iff t = 0, or None when the translation slot is unknown."""
        if self.translation is None:
            return None
        return self.translation == 0


def _is_integer(c) -> bool:
    return is_real(c) and mpq(c).denominator == 1


def _mp(c):
    if isinstance(c, (int,)) or type(c).__name__ == "mpq":
        q = mpq(c)
        return mpmath.mpf(int(q.numerator)) / int(q.denominator)
    r, i = real_part(c), imag_part(c)
    return mpmath.mpc(mpmath.mpf(int(r.numerator)) / int(r.denominator),
                      mpmath.mpf(int(i.numerator)) / int(i.denominator))


def gamma_exact(z, dps: int = 30):
    """Γ(z): exact integer for positive integers, mpmath value at ``dps`` digits otherwise.

    Raises
    ------
    PoleOfGamma
        For z = 0, −1, −2, …
    """
    if _is_integer(z):
        n = int(mpq(z))
        if n <= 0:
            raise PoleOfGamma(f"Γ has a pole at {n}")
        return mpq(math.factorial(n - 1))
    with mpmath.workdps(dps):
        return +mpmath.gamma(_mp(z))


@dataclass
class ElizarovInput:
    """μ and f = Σ f_(m,n) x^m y^n with m ≥ 1, n ≥ −1 and f_(0,0) = f_(0,1) = f_(1,1) = 0."""

    mu: Coefficient
    coefficients: dict

    def __post_init__(self):
        for (m, n) in self.coefficients:
            if m < 1:
                raise ConstraintViolated(f"m >= 1 (got f_({m},{n}))", module="modular")
            if n < -1:
                raise ConstraintViolated(f"n >= -1 (got f_({m},{n}))", module="modular")
        for key in ((0, 0), (0, 1), (1, 1)):
            if self.coefficients.get(key, 0) != 0:
                raise ConstraintViolated("f_(0,0) = f_(0,1) = f_(1,1) = 0", module="modular")

    def __add__(self, other: "ElizarovInput") -> "ElizarovInput":
        if self.mu != other.mu:
            raise ValueError("different μ")
        c = dict(self.coefficients)
        for k, v in other.coefficients.items():
            c[k] = c.get(k, 0) + v
        return ElizarovInput(self.mu, {k: v for k, v in c.items() if v != 0})

    def scale(self, a) -> "ElizarovInput":
        return ElizarovInput(self.mu, {k: v * a for k, v in self.coefficients.items() if v * a != 0})


@dataclass
class ElizarovOutput:
    dphi: dict
    dt: object
    exact: dict
    flagged: list
    metadata: dict

    def to_dict(self):
        def show(v, ex):
            if ex:
                return {"value": format_coeff(v), "provenance": "exact"}
            c = complex(v)
            return {"value": [c.real, c.imag], "provenance": f"float({self.metadata['dps']} digits)"}

        return {
            "dphi": {str(n): show(v, self.exact[n]) for n, v in sorted(self.dphi.items())},
            "dt": show(self.dt, self.exact["t"]),
            "flagged_poles": [list(k) for k in self.flagged],
            "metadata": self.metadata,
        }


def _recip_gamma_term(arg, dps):
    """1/Γ(arg) or None at a pole."""
    try:
        g = gamma_exact(arg, dps)
    except PoleOfGamma:
        return None
    if type(g).__name__ == "mpq":
        return 1 / g
    with mpmath.workdps(dps):
        return 1 / g


def elizarov_derivative(inp: ElizarovInput, dps: int = 40) -> ElizarovOutput:
    """dφ_n/dε (n ≥ 1) and dt/dε at ε = 0.

    dφ_n = n^(μn−1)·e^(−2iπnμ)·Σ_(m>0) m·f_(m,n)·(−n)^m / Γ(1+m+μn)
    dt   = (−1)^(−μ)·e^(2iπμ)·Σ_(m>0) m·f_(m,−1) / Γ(1+m−μ)

    Values are exact when μn (resp. μ) is an integer, otherwise mpmath values at
    ``dps`` digits.  Terms at a pole of Γ have 1/Γ = 0; they are listed in
    ``flagged`` rather than dropped silently.  Coefficients with n = 0 enter
    neither formula.
    """
    mu = inp.mu
    by_n: dict[int, list] = {}
    for (m, n), v in inp.coefficients.items():
        if v != 0:
            by_n.setdefault(n, []).append((m, v))
    flagged = []
    dphi, exact = {}, {}
    for n in sorted(k for k in by_n if k >= 1):
        mun = mu * n
        ex = _is_integer(mun)
        terms = sorted(by_n[n])
        if ex:
            e = int(mpq(mun))
            total = mpq(0)
            for m, f in terms:
                rg = _recip_gamma_term(1 + m + e, dps)
                if rg is None:
                    flagged.append((m, n))
                    continue
                total = total + f * m * rg * (-n) ** m
            dphi[n] = total * mpq(n) ** (e - 1)
        else:
            with mpmath.workdps(dps):
                total = mpmath.mpc(0)
                for m, f in terms:
                    rg = _recip_gamma_term(1 + m + mun, dps)
                    if rg is None:
                        flagged.append((m, n))
                        continue
                    total += _mp(f) * m * rg * (-n) ** m
                pref = mpmath.power(n, _mp(mun) - 1) * mpmath.expjpi(-2 * _mp(mun))
                dphi[n] = +(pref * total)
        exact[n] = ex
    terms = sorted(by_n.get(-1, []))
    if _is_integer(mu):
        e = int(mpq(mu))
        total = mpq(0)
        for m, f in terms:
            rg = _recip_gamma_term(1 + m - e, dps)
            if rg is None:
                flagged.append((m, -1))
                continue
            total = total + f * m * rg
        dt = total * (-1) ** (e % 2)  # e^(iπμ) for integer μ
        exact["t"] = True
    else:
        with mpmath.workdps(dps):
            total = mpmath.mpc(0)
            for m, f in terms:
                rg = _recip_gamma_term(1 + m - mu, dps)
                if rg is None:
                    flagged.append((m, -1))
                    continue
                total += _mp(f) * m * rg
            pref = mpmath.power(-1, -_mp(mu)) * mpmath.expjpi(2 * _mp(mu))
            dt = +(pref * total)
        exact["t"] = False
    meta = {"branch": BRANCH, "dt_reading": DT_READING, "dps": dps}
    return ElizarovOutput(dphi, dt, exact, flagged, meta)
