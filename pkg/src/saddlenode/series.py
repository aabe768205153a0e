"""Truncated formal power series in one and two variables with exact coefficients.

A series of truncation order ``N`` stores coefficients of total degree ``<= N``
and stands for the class of its polynomial representative modulo degree
``N + 1``.  Ring operations, composition with maps vanishing at the origin and
compositional inversion are exact in that quotient.  Differentiation and
division by a variable are not defined on the quotient, so they act on the
polynomial representative; callers that need them exact must keep inputs
polynomial of degree ``<= N`` (all fields in this package are).

Operands with different truncation orders are rejected rather than silently
re-truncated.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

from gmpy2 import mpq

from .coeffs import Coefficient, GaussianRational, coeff, format_coeff
from .errors import (
    DivisionByNonUnit,
    NonVanishingShift,
    SingularLinearPart,
    TruncationMismatch,
)

__all__ = [
    "TruncatedSeries1",
    "TruncatedSeries2",
    "LaurentSlice",
    "add",
    "mul",
    "divide",
    "compose2",
    "compose1",
    "substitute_1d",
    "invert_series_pair",
    "revert1",
    "derive",
    "integrate1",
    "residue",
    "INFINITE",
]

INFINITE = math.inf

_SCALARS = (int, type(mpq(0)), GaussianRational)


def _as_scalar(value):
    if isinstance(value, _SCALARS):
        return value if not isinstance(value, int) else mpq(value)
    return coeff(value)


def _check_order(a, b):
    if a.order != b.order:
        raise TruncationMismatch(f"truncation orders differ: {a.order} vs {b.order}")


# ---------------------------------------------------------------------------
# bivariate


def _mul_terms(a: Mapping, b: Mapping, order: int) -> dict:
    if len(a) > len(b):
        a, b = b, a
    bt = sorted(((i + j, i, j, c) for (i, j), c in b.items()))
    out: dict = {}
    get = out.get
    for (i1, j1), c1 in a.items():
        rem = order - i1 - j1
        if rem < 0:
            continue
        for d2, i2, j2, c2 in bt:
            if d2 > rem:
                break
            key = (i1 + i2, j1 + j2)
            out[key] = get(key, 0) + c1 * c2
    return {k: v for k, v in out.items() if v != 0}


class TruncatedSeries2:
    """Bivariate series sum c_ij x^i y^j, i + j <= order.

    Instances are immutable; all operations return new series.
    """

    __slots__ = ("order", "_terms")

    def __init__(self, order: int, terms: Mapping | Iterable | None = None):
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        self.order = int(order)
        clean = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for (i, j), c in items:
                if i < 0 or j < 0:
                    raise ValueError("negative exponent")
                if i + j > order:
                    continue
                c = _as_scalar(c)
                if c != 0:
                    key = (int(i), int(j))
                    clean[key] = clean.get(key, 0) + c
            clean = {k: v for k, v in clean.items() if v != 0}
        self._terms = clean

    @classmethod
    def _raw(cls, order, terms):
        s = cls.__new__(cls)
        s.order = order
        s._terms = terms
        return s

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, order: int) -> "TruncatedSeries2":
        return cls._raw(order, {})

    @classmethod
    def constant(cls, c, order: int) -> "TruncatedSeries2":
        return cls(order, {(0, 0): c})

    @classmethod
    def one(cls, order: int) -> "TruncatedSeries2":
        return cls.constant(1, order)

    @classmethod
    def x(cls, order: int) -> "TruncatedSeries2":
        return cls(order, {(1, 0): 1})

    @classmethod
    def y(cls, order: int) -> "TruncatedSeries2":
        return cls(order, {(0, 1): 1})

    @classmethod
    def monomial(cls, i: int, j: int, c, order: int) -> "TruncatedSeries2":
        return cls(order, {(i, j): c})

    @classmethod
    def from_1d(cls, s: "TruncatedSeries1", var: str = "x", order: int | None = None):
        """Embed a univariate series as a function of ``x`` or ``y``."""
        order = s.order if order is None else order
        if var == "x":
            return cls(order, {(n, 0): c for n, c in enumerate(s.coeffs)})
        if var == "y":
            return cls(order, {(0, n): c for n, c in enumerate(s.coeffs)})
        raise ValueError(f"unknown variable {var!r}")

    # access --------------------------------------------------------------
    def coeff(self, i: int, j: int) -> Coefficient:
        return self._terms.get((i, j), mpq(0))

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: (kv[0][0] + kv[0][1], -kv[0][0]))

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def constant_term(self) -> Coefficient:
        return self.coeff(0, 0)

    def valuation(self):
        """Lowest total degree present; ``INFINITE`` for the zero series."""
        if not self._terms:
            return INFINITE
        return min(i + j for i, j in self._terms)

    def x_valuation(self):
        if not self._terms:
            return INFINITE
        return min(i for i, _ in self._terms)

    def y_valuation(self):
        if not self._terms:
            return INFINITE
        return min(j for _, j in self._terms)

    def degree(self):
        if not self._terms:
            return -1
        return max(i + j for i, j in self._terms)

    def homogeneous(self, d: int) -> "TruncatedSeries2":
        return TruncatedSeries2._raw(self.order, {k: v for k, v in self._terms.items() if k[0] + k[1] == d})

    def truncated(self, d: int) -> "TruncatedSeries2":
        """Drop terms of degree > d, keeping the truncation order."""
        return TruncatedSeries2._raw(self.order, {k: v for k, v in self._terms.items() if k[0] + k[1] <= d})

    def with_order(self, order: int) -> "TruncatedSeries2":
        """Explicit change of truncation order (raising it zero-pads the representative)."""
        return TruncatedSeries2(order, self._terms)

    def is_real(self) -> bool:
        return all(not isinstance(c, GaussianRational) for c in self._terms.values())

    def map_coeffs(self, fn) -> "TruncatedSeries2":
        return TruncatedSeries2(self.order, {k: fn(v) for k, v in self._terms.items()})

    def linear_coeffs(self) -> tuple[Coefficient, Coefficient]:
        return self.coeff(1, 0), self.coeff(0, 1)

    # arithmetic ----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, TruncatedSeries2):
            _check_order(self, other)
            return other
        if isinstance(other, TruncatedSeries1):
            raise TypeError("cannot mix univariate and bivariate series; embed with from_1d")
        return TruncatedSeries2.constant(_as_scalar(other), self.order)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for k, v in other._terms.items():
            s = out.get(k, 0) + v
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
        return TruncatedSeries2._raw(self.order, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries2._raw(self.order, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "TruncatedSeries2":
        c = _as_scalar(c)
        if c == 0:
            return TruncatedSeries2.zero(self.order)
        return TruncatedSeries2._raw(self.order, {k: v * c for k, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, (TruncatedSeries2, TruncatedSeries1)):
            return self.scale(other)
        other = self._coerce(other)
        return TruncatedSeries2._raw(self.order, _mul_terms(self._terms, other._terms, self.order))

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only natural powers are supported")
        result = TruncatedSeries2.one(self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inverse(self) -> "TruncatedSeries2":
        c0 = self.constant_term
        if c0 == 0:
            raise DivisionByNonUnit("divisor has zero constant term")
        by_deg: dict[int, dict] = defaultdict(dict)
        for (i, j), c in self._terms.items():
            if i + j > 0:
                by_deg[i + j][(i, j)] = c
        inv0 = 1 / c0
        parts: list[dict] = [{(0, 0): inv0}]
        N = self.order
        for d in range(1, N + 1):
            acc: dict = {}
            for e in range(1, d + 1):
                be = by_deg.get(e)
                if not be or not parts[d - e]:
                    continue
                for k, v in _mul_terms(be, parts[d - e], N).items():
                    acc[k] = acc.get(k, 0) + v
            parts.append({k: -v * inv0 for k, v in acc.items() if v != 0})
        out = {}
        for p in parts:
            out.update(p)
        return TruncatedSeries2._raw(N, out)

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries2):
            _check_order(self, other)
            if other.constant_term == 0:
                raise DivisionByNonUnit("divisor has zero constant term")
            return self * other.inverse()
        c = _as_scalar(other)
        if c == 0:
            raise ZeroDivisionError("division by zero scalar")
        return self.scale(1 / c)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries2):
            n = min(self.order, other.order)
            a = {k: v for k, v in self._terms.items() if k[0] + k[1] <= n}
            b = {k: v for k, v in other._terms.items() if k[0] + k[1] <= n}
            return a == b
        if isinstance(other, (TruncatedSeries1,)):
            return NotImplemented
        try:
            c = _as_scalar(other)
        except TypeError:
            return NotImplemented
        return self._terms == ({(0, 0): c} if c != 0 else {})

    __hash__ = None

    # calculus ------------------------------------------------------------
    def derive(self, var: str) -> "TruncatedSeries2":
        if var == "x":
            return TruncatedSeries2._raw(self.order, {(i - 1, j): c * i for (i, j), c in self._terms.items() if i > 0})
        if var == "y":
            return TruncatedSeries2._raw(self.order, {(i, j - 1): c * j for (i, j), c in self._terms.items() if j > 0})
        raise ValueError(f"unknown variable {var!r}")

    def divide_monomial(self, a: int, b: int) -> "TruncatedSeries2":
        """Exact division by x^a y^b; raises if some term is not divisible."""
        out = {}
        for (i, j), c in self._terms.items():
            if i < a or j < b:
                raise DivisionByNonUnit(f"term x^{i} y^{j} not divisible by x^{a} y^{b}")
            out[(i - a, j - b)] = c
        return TruncatedSeries2._raw(self.order, out)

    def times_monomial(self, a: int, b: int) -> "TruncatedSeries2":
        return TruncatedSeries2(self.order, {(i + a, j + b): c for (i, j), c in self._terms.items()})

    # restrictions ----------------------------------------------------------
    def at_y0(self) -> "TruncatedSeries1":
        """Restriction to the axis {y = 0}, as a series in x."""
        c = [mpq(0)] * (self.order + 1)
        for (i, j), v in self._terms.items():
            if j == 0:
                c[i] = v
        return TruncatedSeries1(self.order, c)

    def at_x0(self) -> "TruncatedSeries1":
        """Restriction to the axis {x = 0}, as a series in y."""
        c = [mpq(0)] * (self.order + 1)
        for (i, j), v in self._terms.items():
            if i == 0:
                c[j] = v
        return TruncatedSeries1(self.order, c)

    def coefficient_in(self, var: str, power: int) -> "TruncatedSeries1":
        """Coefficient of ``var**power`` as a series in the other variable."""
        c = [mpq(0)] * (self.order + 1)
        for (i, j), v in self._terms.items():
            if var == "y" and j == power:
                c[i] = v
            elif var == "x" and i == power:
                c[j] = v
        return TruncatedSeries1(self.order, c)

    def evaluate(self, x, y):
        """Exact evaluation of the polynomial representative."""
        total = mpq(0)
        for (i, j), c in self._terms.items():
            total = total + c * (x ** i) * (y ** j)
        return total

    def __call__(self, u, v):
        return compose2(self, u, v)

    # display ---------------------------------------------------------------
    def __repr__(self):
        return f"TruncatedSeries2(order={self.order}, {self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for (i, j), c in self.items():
            mono = "*".join(
                s for s in (
                    "" if i == 0 else ("x" if i == 1 else f"x^{i}"),
                    "" if j == 0 else ("y" if j == 1 else f"y^{j}"),
                ) if s
            )
            cs = format_coeff(c)
            if isinstance(c, GaussianRational) and c.re != 0:
                cs = f"({cs})"
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# univariate


class TruncatedSeries1:
    """Univariate series sum c_n t^n, n <= order, stored densely."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Iterable = ()):
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        c = [_as_scalar(v) for v in list(coeffs)[: order + 1]]
        c.extend([mpq(0)] * (order + 1 - len(c)))
        self.order = int(order)
        self.coeffs = tuple(c)

    @classmethod
    def _raw(cls, order, coeffs):
        s = cls.__new__(cls)
        s.order = order
        s.coeffs = tuple(coeffs)
        return s

    @classmethod
    def zero(cls, order):
        return cls._raw(order, [mpq(0)] * (order + 1))

    @classmethod
    def constant(cls, c, order):
        return cls(order, [c])

    @classmethod
    def one(cls, order):
        return cls.constant(1, order)

    @classmethod
    def var(cls, order):
        return cls(order, [0, 1])

    @classmethod
    def geometric(cls, ratio, order):
        """1 / (1 - ratio * t)."""
        r = _as_scalar(ratio)
        return cls(order, [r ** n for n in range(order + 1)])

    def __getitem__(self, n):
        return self.coeffs[n] if 0 <= n <= self.order else mpq(0)

    def valuation(self):
        for n, c in enumerate(self.coeffs):
            if c != 0:
                return n
        return INFINITE

    def degree(self):
        for n in range(self.order, -1, -1):
            if self.coeffs[n] != 0:
                return n
        return -1

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def with_order(self, order):
        return TruncatedSeries1(order, self.coeffs)

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries1):
            _check_order(self, other)
            return other
        if isinstance(other, TruncatedSeries2):
            raise TypeError("cannot mix univariate and bivariate series")
        return TruncatedSeries1.constant(_as_scalar(other), self.order)

    def __add__(self, other):
        o = self._coerce(other)
        return TruncatedSeries1._raw(self.order, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries1._raw(self.order, [-a for a in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        return TruncatedSeries1._raw(self.order, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c):
        c = _as_scalar(c)
        return TruncatedSeries1._raw(self.order, [a * c for a in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, (TruncatedSeries1, TruncatedSeries2)):
            return self.scale(other)
        o = self._coerce(other)
        N = self.order
        out = [mpq(0)] * (N + 1)
        a_nz = [(n, c) for n, c in enumerate(self.coeffs) if c != 0]
        b_nz = [(n, c) for n, c in enumerate(o.coeffs) if c != 0]
        for n1, c1 in a_nz:
            for n2, c2 in b_nz:
                if n1 + n2 > N:
                    break
                out[n1 + n2] = out[n1 + n2] + c1 * c2
        return TruncatedSeries1._raw(N, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only natural powers are supported; see power()")
        result = TruncatedSeries1.one(self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inverse(self):
        c0 = self.coeffs[0]
        if c0 == 0:
            raise DivisionByNonUnit("divisor has zero constant term")
        N = self.order
        inv0 = 1 / c0
        r = [inv0] + [mpq(0)] * N
        for d in range(1, N + 1):
            acc = mpq(0)
            for e in range(1, d + 1):
                if self.coeffs[e] != 0:
                    acc = acc + self.coeffs[e] * r[d - e]
            r[d] = -acc * inv0
        return TruncatedSeries1._raw(N, r)

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries1):
            _check_order(self, other)
            return self * other.inverse()
        c = _as_scalar(other)
        if c == 0:
            raise ZeroDivisionError("division by zero scalar")
        return self.scale(1 / c)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries1):
            n = min(self.order, other.order)
            return self.coeffs[: n + 1] == other.coeffs[: n + 1]
        if isinstance(other, TruncatedSeries2):
            return NotImplemented
        try:
            c = _as_scalar(other)
        except TypeError:
            return NotImplemented
        return self.coeffs[0] == c and all(v == 0 for v in self.coeffs[1:])

    __hash__ = None

    def derive(self):
        N = self.order
        c = [self.coeffs[n + 1] * (n + 1) for n in range(N)] + [mpq(0)]
        return TruncatedSeries1._raw(N, c)

    def integrate(self):
        """Primitive vanishing at 0.

        A series known modulo t^(N+1) has a primitive known modulo t^(N+2), so
        the result carries order N + 1; use ``with_order`` to come back.
        """
        N = self.order
        c = [mpq(0)] + [self.coeffs[n] / (n + 1) for n in range(N + 1)]
        return TruncatedSeries1._raw(N + 1, c)

    def shift_down(self, k: int):
        """Divide by t^k exactly (raises if not divisible)."""
        if any(self.coeffs[n] != 0 for n in range(min(k, self.order + 1))):
            raise DivisionByNonUnit(f"series not divisible by t^{k}")
        c = list(self.coeffs[k:]) + [mpq(0)] * k
        return TruncatedSeries1._raw(self.order, c[: self.order + 1])

    def shift_up(self, k: int):
        c = [mpq(0)] * k + list(self.coeffs)
        return TruncatedSeries1._raw(self.order, c[: self.order + 1])

    def compose(self, inner: "TruncatedSeries1") -> "TruncatedSeries1":
        return compose1(self, inner)

    def exp(self):
        """exp of a series with zero constant term."""
        if self.coeffs[0] != 0:
            raise NonVanishingShift("exp needs a zero constant term to stay exact")
        N = self.order
        # e' = s' e, solved degree by degree
        ds = [self.coeffs[n] * n for n in range(N + 1)]
        e = [mpq(1)] + [mpq(0)] * N
        for n in range(1, N + 1):
            acc = mpq(0)
            for m in range(1, n + 1):
                if ds[m] != 0:
                    acc = acc + ds[m] * e[n - m]
            e[n] = acc / n
        return TruncatedSeries1._raw(N, e)

    def log(self):
        """log of a series with constant term 1."""
        if self.coeffs[0] != 1:
            raise DivisionByNonUnit("log needs constant term 1")
        return (self.derive() / self).integrate().with_order(self.order)

    def power(self, exponent) -> "TruncatedSeries1":
        """(constant-1 series) ** rational exponent, by the binomial recurrence."""
        if self.coeffs[0] != 1:
            raise DivisionByNonUnit("rational powers need constant term 1")
        a = _as_scalar(exponent)
        N = self.order
        c = self.coeffs
        # p' s = a s' p  with p(0) = 1
        p = [mpq(1)] + [mpq(0)] * N
        for n in range(1, N + 1):
            acc = mpq(0)
            for m in range(1, n + 1):
                if c[m] != 0:
                    acc = acc + c[m] * p[n - m] * (a * m - (n - m))
            p[n] = acc / n
        return TruncatedSeries1._raw(N, p)

    def evaluate(self, t):
        total = mpq(0)
        for c in reversed(self.coeffs):
            total = total * t + c
        return total

    def taylor_shift(self, t0):
        """Coefficients of p(t0 + s) in s for the polynomial representative p."""
        N = self.order
        c = list(self.coeffs)
        t0 = _as_scalar(t0)
        # repeated synthetic division
        out = []
        for _ in range(N + 1):
            acc = mpq(0)
            rem = []
            for v in reversed(c):
                acc = acc * t0 + v
                rem.append(acc)
            out.append(rem[-1])
            c = list(reversed(rem[:-1]))
        return TruncatedSeries1._raw(N, out)

    def __repr__(self):
        return f"TruncatedSeries1(order={self.order}, {self})"

    def __str__(self):
        parts = []
        for n, c in enumerate(self.coeffs):
            if c == 0:
                continue
            cs = format_coeff(c)
            if isinstance(c, GaussianRational) and c.re != 0:
                cs = f"({cs})"
            mono = "" if n == 0 else ("t" if n == 1 else f"t^{n}")
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return (" + ".join(parts) or "0").replace("+ -", "- ")


@dataclass(frozen=True)
class LaurentSlice:
    """y^(-pole_order) * series."""

    pole_order: int
    series: TruncatedSeries1

    def residue(self) -> Coefficient:
        return residue(self)


# ---------------------------------------------------------------------------
# module-level operations


def add(a, b):
    return a + b


def mul(a, b):
    return a * b


def divide(a, b):
    """a / b for series of equal order; b must be a unit."""
    if isinstance(b, (TruncatedSeries1, TruncatedSeries2)):
        _check_order(a, b)
    return a / b


def derive(f, variable: str | None = None):
    if isinstance(f, TruncatedSeries1):
        return f.derive()
    return f.derive(variable)


def integrate1(f: TruncatedSeries1) -> TruncatedSeries1:
    return f.integrate()


def residue(l: LaurentSlice) -> Coefficient:
    if l.pole_order < 1:
        return mpq(0)
    return l.series[l.pole_order - 1]


def compose1(f: TruncatedSeries1, g: TruncatedSeries1) -> TruncatedSeries1:
    """f(g(t)) with g(0) = 0."""
    _check_order(f, g)
    if g.coeffs[0] != 0:
        raise NonVanishingShift("inner series must vanish at 0")
    N = f.order
    result = TruncatedSeries1.constant(f.coeffs[N], N)
    for n in range(N - 1, -1, -1):
        result = result * g + f.coeffs[n]
    return result


def revert1(g: TruncatedSeries1) -> TruncatedSeries1:
    """Compositional inverse of g with g(0) = 0, g'(0) != 0."""
    if g.coeffs[0] != 0:
        raise NonVanishingShift("series must vanish at 0")
    a1 = g[1]
    if a1 == 0:
        raise SingularLinearPart("zero linear coefficient")
    N = g.order
    h = TruncatedSeries1(N, [0, 1 / a1])
    nonlinear = g - TruncatedSeries1(N, [0, a1])
    for _ in range(N):
        new = (TruncatedSeries1.var(N) - compose1(nonlinear, h)) / a1
        if new == h:
            break
        h = new
    return h


def _check_shift(*series):
    for s in series:
        if s.constant_term != 0:
            raise NonVanishingShift("substituted series must vanish at the origin")


def compose2(f: TruncatedSeries2, u: TruncatedSeries2, v: TruncatedSeries2) -> TruncatedSeries2:
    """f(u(x, y), v(x, y)) with u(0,0) = v(0,0) = 0."""
    _check_order(f, u)
    _check_order(f, v)
    _check_shift(u, v)
    N = f.order
    if not f._terms:
        return TruncatedSeries2.zero(N)
    rows: dict[int, list] = defaultdict(list)
    for (i, j), c in f._terms.items():
        rows[i].append((j, c))
    max_j = max(j for (_, j) in f._terms)
    vpow = [TruncatedSeries2.one(N)]
    for _ in range(max_j):
        vpow.append(vpow[-1] * v)
    imax = max(rows)

    def row_value(i):
        acc: dict = {}
        for j, c in rows.get(i, ()):
            for k, val in vpow[j]._terms.items():
                acc[k] = acc.get(k, 0) + c * val
        return TruncatedSeries2._raw(N, {k: val for k, val in acc.items() if val != 0})

    result = row_value(imax)
    for i in range(imax - 1, -1, -1):
        result = result * u + row_value(i)
    return result


def substitute_1d(f: TruncatedSeries2, u: TruncatedSeries1, v: TruncatedSeries1) -> TruncatedSeries1:
    """f(u(t), v(t)) for univariate u, v vanishing at 0."""
    _check_order(u, v)
    if f.order != u.order:
        raise TruncationMismatch("orders differ")
    if u.coeffs[0] != 0 or v.coeffs[0] != 0:
        raise NonVanishingShift("substituted series must vanish at 0")
    N = f.order
    result = TruncatedSeries1.zero(N)
    rows: dict[int, list] = defaultdict(list)
    for (i, j), c in f._terms.items():
        rows[i].append((j, c))
    if not rows:
        return result
    max_j = max(j for (_, j) in f._terms)
    vpow = [TruncatedSeries1.one(N)]
    for _ in range(max_j):
        vpow.append(vpow[-1] * v)
    imax = max(rows)
    for i in range(imax, -1, -1):
        row = TruncatedSeries1.zero(N)
        for j, c in rows.get(i, ()):
            row = row + vpow[j].scale(c)
        result = result * u + row
    return result


def linear_part(u: TruncatedSeries2, v: TruncatedSeries2):
    """Jacobian matrix at the origin of the map (u, v)."""
    return ((u.coeff(1, 0), u.coeff(0, 1)), (v.coeff(1, 0), v.coeff(0, 1)))


def invert_series_pair(u: TruncatedSeries2, v: TruncatedSeries2):
    """Compositional inverse (U, V) of the map (u, v): (u, v) o (U, V) = id."""
    _check_order(u, v)
    _check_shift(u, v)
    N = u.order
    (a, b), (c, d) = linear_part(u, v)
    det = a * d - b * c
    if det == 0:
        raise SingularLinearPart("linear part of the map is not invertible")
    ia, ib, ic, id_ = d / det, -b / det, -c / det, a / det
    X, Y = TruncatedSeries2.x(N), TruncatedSeries2.y(N)
    pu = u - (X * a + Y * b)
    pv = v - (X * c + Y * d)
    U = X * ia + Y * ib
    V = X * ic + Y * id_
    for _ in range(N):
        ru = X - compose2(pu, U, V)
        rv = Y - compose2(pv, U, V)
        newU = ru * ia + rv * ib
        newV = ru * ic + rv * id_
        if newU == U and newV == V:
            break
        U, V = newU, newV
    return U, V
