"""Continued fractions of symbolically given irrationals and the Brjuno sum.

Irrational inputs are never floats.  Three exact presentations are supported:

* :class:`QuadraticSurd` ``a + b·√D`` (exact periodic expansion),
* :class:`DigitExpansion`, a number given by its base-``b`` digit function
  (partial quotients are certified from nested rational enclosures),
* :class:`PartialQuotients`, a number given directly by its partial quotients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

import gmpy2
from gmpy2 import mpq

from .errors import RationalInput

__all__ = [
    "QuadraticSurd",
    "DigitExpansion",
    "PartialQuotients",
    "liouville",
    "golden_ratio",
    "BrjunoReport",
    "brjuno_report",
    "convergents",
    "CONVERGED",
    "DIVERGED",
    "INCONCLUSIVE",
]

CONVERGED = "ConvergedWithinBudget"
DIVERGED = "DivergedBeyondThreshold"
INCONCLUSIVE = "Inconclusive"


def _isqrt(n: int) -> int:
    return int(gmpy2.isqrt(n))


class QuadraticSurd:
    """a + b·√D with rational a, b (b ≠ 0) and D > 1 a non-square integer."""

    def __init__(self, a, b, D: int):
        a, b, D = mpq(a), mpq(b), int(D)
        if D < 0:
            raise ValueError("only real surds are supported")
        r = _isqrt(D)
        if r * r == D or b == 0:
            raise RationalInput(f"{a} + {b}·√{D} is rational")
        # pull square factors out of D so equal surds compare equal
        k = 2
        while k * k <= D:
            while D % (k * k) == 0:
                D //= k * k
                b *= k
            k += 1
        self.a, self.b, self.D = a, b, D

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.D)

    def __neg__(self):
        return QuadraticSurd(-self.a, -self.b, self.D)

    def __abs__(self):
        return -self if float(self) < 0 else self

    def __eq__(self, other):
        return isinstance(other, QuadraticSurd) and (self.a, self.b, self.D) == (other.a, other.b, other.D)

    def __hash__(self):
        return hash((self.a, self.b, self.D))

    def __repr__(self):
        return f"QuadraticSurd({self.a} + {self.b}·√{self.D})"

    def __str__(self):
        sign = "+" if self.b > 0 else "-"
        bb = abs(self.b)
        bs = "" if bb == 1 else f"{bb}*"
        return f"{self.a} {sign} {bs}sqrt({self.D})" if self.a != 0 else f"{'' if self.b > 0 else '-'}{bs}sqrt({self.D})"

    def partial_quotients(self) -> Iterator[int]:
        """Exact continued-fraction expansion, via the (P + √D)/Q recurrence."""
        L = math.lcm(int(self.a.denominator), int(self.b.denominator))
        A = int(self.a * L)
        B = int(self.b * L)
        P, Dq, Q = A, B * B * self.D, L
        if B < 0:
            P, Q = -A, -L
        if (Dq - P * P) % Q != 0:
            P, Dq, Q = P * abs(Q), Dq * Q * Q, Q * abs(Q)
        s = _isqrt(Dq)
        while True:
            if Q > 0:
                a = (P + s) // Q
            else:
                a = -((P + s) // (-Q)) - 1
            yield a
            P = a * Q - P
            Q = (Dq - P * P) // Q


def golden_ratio() -> QuadraticSurd:
    return QuadraticSurd(mpq(1, 2), mpq(1, 2), 5)


def _cf_of_fraction(x: Fraction) -> list[int]:
    out = []
    n, d = x.numerator, x.denominator
    while d:
        a = n // d
        out.append(a)
        n, d = d, n - a * d
    return out


@dataclass
class DigitExpansion:
    """x = Σ_k digit(k)·base^(−k) (k ≥ 1) plus an integer part.

    ``max_digits`` caps the working precision; expansions that need more
    digits to certify further partial quotients stop there.
    """

    digit: Callable[[int], int]
    base: int = 10
    integer_part: int = 0
    max_digits: int = 50_000
    label: str = "digit expansion"

    def truncation(self, k: int) -> Fraction:
        num = self.integer_part
        for j in range(1, k + 1):
            num = num * self.base + self.digit(j)
        return Fraction(num, self.base ** k)

    def partial_quotients(self) -> Iterator[int]:
        produced = 0
        k = 32
        while True:
            lo = self.truncation(k)
            hi = lo + Fraction(1, self.base ** k)
            a, b = _cf_of_fraction(lo), _cf_of_fraction(hi)
            common = 0
            # the last quotient of each expansion is not certified
            while common < min(len(a), len(b)) - 1 and a[common] == b[common]:
                common += 1
            while produced < common:
                yield a[produced]
                produced += 1
            if k >= self.max_digits:
                return
            k = min(2 * k, self.max_digits)

    def __str__(self):
        return self.label


def liouville(base: int = 10, max_digits: int = 50_000) -> DigitExpansion:
    """Σ_{k≥1} base^(−k!)."""
    facts = set()
    f, k = 1, 1
    while f <= max_digits:
        facts.add(f)
        k += 1
        f *= k
    return DigitExpansion(lambda j: 1 if j in facts else 0, base=base, max_digits=max_digits,
                          label=f"sum_k {base}^(-k!)")


@dataclass
class PartialQuotients:
    """[a0; a1, a2, …] given by a function n ↦ a_n (a_n ≥ 1 for n ≥ 1)."""

    quotient: Callable[[int], int]
    label: str = "continued fraction"

    def partial_quotients(self) -> Iterator[int]:
        n = 0
        while True:
            yield int(self.quotient(n))
            n += 1

    def __str__(self):
        return self.label


def convergents(quotients) -> Iterator[tuple[int, int]]:
    """(p_n, q_n) from partial quotients a_0, a_1, …"""
    p_prev, p = 1, None
    q_prev, q = 0, None
    for i, a in enumerate(quotients):
        if i == 0:
            p, q = a, 1
            p_prev, q_prev = 1, 0
        else:
            p, p_prev = a * p + p_prev, p
            q, q_prev = a * q + q_prev, q
        yield p, q


@dataclass
class BrjunoReport:
    target: str
    convergents: list = field(default_factory=list)
    partial_sums: list = field(default_factory=list)
    verdict: str = INCONCLUSIVE
    max_terms: int = 200
    divergence_threshold: float = 1e3
    convergence_tol: float = 1e-8

    @property
    def increments(self) -> list[float]:
        s = self.partial_sums
        return [s[0]] + [s[i] - s[i - 1] for i in range(1, len(s))] if s else []

    def to_dict(self):
        return {
            "target": self.target,
            "terms": len(self.partial_sums),
            "partial_sum": self.partial_sums[-1] if self.partial_sums else 0.0,
            "verdict": self.verdict,
            "max_terms": self.max_terms,
            "divergence_threshold": self.divergence_threshold,
        }


def _log_int(n: int) -> float:
    """Natural log of a (possibly huge) positive integer."""
    b = n.bit_length()
    if b < 1000:
        return math.log(n)
    shift = b - 60
    return math.log(n >> shift) + shift * math.log(2)


def _fractional_input(value):
    if isinstance(value, (int, Fraction)) or type(value).__name__ in ("mpq", "mpz"):
        return True
    return False


def brjuno_report(value, max_terms: int = 200, divergence_threshold: float = 1e3,
                  convergence_tol: float = 1e-8, window: int = 3) -> BrjunoReport:
    """Budgeted Brjuno sum Σ log(q_{n+1})/q_n for the continued fraction of |value|.

    Verdicts: ``DivergedBeyondThreshold`` as soon as a partial sum exceeds the
    threshold; ``ConvergedWithinBudget`` once ``window`` consecutive increments
    are below ``convergence_tol``; ``Inconclusive`` when the term budget or the
    input's certified precision runs out first.

    Raises
    ------
    RationalInput
        For rational inputs (resonant, not a small-divisor case).
    """
    if _fractional_input(value):
        raise RationalInput(f"{value} is rational")
    if isinstance(value, float):
        raise TypeError("floats are not accepted; give a quadratic surd, digit or partial-quotient expansion")
    if isinstance(value, QuadraticSurd):
        value = abs(value)
    report = BrjunoReport(str(value), max_terms=max_terms, divergence_threshold=divergence_threshold,
                          convergence_tol=convergence_tol)
    conv = convergents(value.partial_quotients())
    total = 0.0
    small_run = 0
    prev_q = None
    for p, q in conv:
        report.convergents.append((p, q))
        if prev_q is not None:
            lq = _log_int(q)
            if prev_q < 2 ** 1000:
                inc = lq / prev_q
            else:
                inc = math.exp(math.log(lq) - _log_int(prev_q)) if lq > 0 else 0.0
            total += inc
            report.partial_sums.append(total)
            if total > divergence_threshold:
                report.verdict = DIVERGED
                return report
            small_run = small_run + 1 if inc < convergence_tol else 0
            if small_run >= window:
                report.verdict = CONVERGED
                return report
            if len(report.partial_sums) >= max_terms:
                break
        prev_q = q
    report.verdict = INCONCLUSIVE
    return report
