"""Exact scalars: rationals and Gaussian rationals.

Real values are plain ``gmpy2.mpq`` objects; values with a nonzero imaginary
part are :class:`GaussianRational`.  Arithmetic between the two is closed and
always normalizes back to ``mpq`` when the imaginary part cancels, so formal
code can use ``+ - * /`` without caring which representation it holds.
"""

from __future__ import annotations

import cmath
import math
import re
from fractions import Fraction
from numbers import Rational
from typing import Union

import gmpy2
import mpmath
from gmpy2 import mpq

__all__ = [
    "GaussianRational",
    "Coefficient",
    "coeff",
    "real_part",
    "imag_part",
    "is_real",
    "to_complex",
    "conj",
    "exact_sqrt",
    "exact_roots",
    "exact_root",
    "format_coeff",
    "I",
]

_MPQ = type(mpq(0))


class GaussianRational:
    """A + B i with rational A, B and B != 0 (use :func:`coeff` to build)."""

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re = mpq(re)
        self.im = mpq(im)

    @staticmethod
    def _make(re, im):
        if im == 0:
            return re
        g = GaussianRational.__new__(GaussianRational)
        g.re = re
        g.im = im
        return g

    @staticmethod
    def _parts(other):
        if isinstance(other, GaussianRational):
            return other.re, other.im
        if isinstance(other, (_MPQ, int, Fraction)) or isinstance(other, Rational):
            return mpq(other), mpq(0)
        return None

    def __add__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return self._make(self.re + p[0], self.im + p[1])

    __radd__ = __add__

    def __sub__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return self._make(self.re - p[0], self.im - p[1])

    def __rsub__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return self._make(p[0] - self.re, p[1] - self.im)

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            a, b, c, d = self.re, self.im, other.re, other.im
            return self._make(a * c - b * d, a * d + b * c)
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return self._make(self.re * p[0], self.im * p[0])

    __rmul__ = __mul__

    def __truediv__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        c, d = p
        n = c * c + d * d
        if n == 0:
            raise ZeroDivisionError("division by zero")
        a, b = self.re, self.im
        return self._make((a * c + b * d) / n, (b * c - a * d) / n)

    def __rtruediv__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return GaussianRational._make(p[0], p[1]) / self if p[1] != 0 else _div_real_by(p[0], self)

    def __neg__(self):
        return self._make(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return _div_real_by(mpq(1), self) ** (-n)
        result: Coefficient = mpq(1)
        base: Coefficient = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        p = self._parts(other)
        if p is None:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self.re == p[0] and self.im == p[1]

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __bool__(self):
        return True

    def conjugate(self):
        return self._make(self.re, -self.im)

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def __repr__(self):
        return f"GaussianRational({format_coeff(self)})"

    def __str__(self):
        return format_coeff(self)


def _div_real_by(r, g: GaussianRational):
    n = g.re * g.re + g.im * g.im
    return GaussianRational._make(r * g.re / n, -r * g.im / n)


Coefficient = Union[_MPQ, GaussianRational]

I = GaussianRational(0, 1)

_NUM = r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:/\d+)?"


def _parse_real(text: str):
    text = text.strip()
    if "/" in text:
        n, d = text.split("/")
        return mpq(Fraction(n)) / mpq(Fraction(d))
    return mpq(Fraction(text))


def coeff(value, imag=None) -> Coefficient:
    """Normalize ``value`` (int, Fraction, mpq, str, GaussianRational) to a Coefficient.

    Strings accept ``"3/4"``, ``"0.25"``, ``"1/2+3/4i"``, ``"-2i"``.  Python
    floats and complex numbers are rejected: they would smuggle rounding into
    exact paths.
    """
    if imag is not None:
        return GaussianRational._make(coeff(value), coeff(imag))
    if isinstance(value, GaussianRational):
        return GaussianRational._make(value.re, value.im)
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, (_MPQ, int, Fraction)):
        return mpq(value)
    if type(value).__name__ == "mpz":
        return mpq(value)
    if isinstance(value, str):
        return _parse_coeff_str(value)
    if isinstance(value, (float, complex)):
        raise TypeError(f"refusing inexact value {value!r}; pass a rational or a string")
    if isinstance(value, Rational):
        return mpq(value.numerator, value.denominator)
    raise TypeError(f"cannot make a coefficient from {value!r}")


def _parse_coeff_str(text: str) -> Coefficient:
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty coefficient")
    if s.endswith("i"):
        m = re.fullmatch(rf"({_NUM})?([+-](?:\d+(?:\.\d*)?(?:/\d+)?)?)i", s)
        if m:
            re_part = _parse_real(m.group(1)) if m.group(1) else mpq(0)
            im_txt = m.group(2)
            im_part = mpq(1) if im_txt in ("+",) else mpq(-1) if im_txt == "-" else _parse_real(im_txt)
            return GaussianRational._make(re_part, im_part)
        m = re.fullmatch(rf"({_NUM})?i", s)
        if m:
            t = m.group(1)
            im_part = mpq(1) if t in (None, "+") else mpq(-1) if t == "-" else _parse_real(t)
            return GaussianRational._make(mpq(0), im_part)
        raise ValueError(f"malformed coefficient {text!r}")
    if not re.fullmatch(_NUM, s):
        raise ValueError(f"malformed coefficient {text!r}")
    return _parse_real(s)


def real_part(c: Coefficient):
    return c.re if isinstance(c, GaussianRational) else mpq(c)


def imag_part(c: Coefficient):
    return c.im if isinstance(c, GaussianRational) else mpq(0)


def is_real(c: Coefficient) -> bool:
    return not isinstance(c, GaussianRational)


def conj(c: Coefficient) -> Coefficient:
    return c.conjugate() if isinstance(c, GaussianRational) else c


def to_complex(c) -> complex:
    if isinstance(c, GaussianRational):
        return complex(c)
    return complex(float(c), 0.0)


def _rational_sqrt(r) -> _MPQ | None:
    r = mpq(r)
    if r < 0:
        return None
    n, d = int(r.numerator), int(r.denominator)
    sn, en = gmpy2.iroot(gmpy2.mpz(n), 2)
    sd, ed = gmpy2.iroot(gmpy2.mpz(d), 2)
    if en and ed:
        return mpq(sn, sd)
    return None


def _rational_root(r, k: int) -> _MPQ | None:
    r = mpq(r)
    if r == 0:
        return mpq(0)
    if r < 0 and k % 2 == 0:
        return None
    sign = -1 if r < 0 else 1
    n, d = abs(int(r.numerator)), int(r.denominator)
    sn, en = gmpy2.iroot(gmpy2.mpz(n), k)
    sd, ed = gmpy2.iroot(gmpy2.mpz(d), k)
    if en and ed:
        return sign * mpq(sn, sd)
    return None


def exact_sqrt(c: Coefficient) -> Coefficient | None:
    """A square root of ``c`` in Q(i), or None if none exists.

    For real ``c >= 0`` the nonnegative root is returned; otherwise the root
    with positive real part (or positive imaginary part when purely imaginary).
    """
    a, b = real_part(c), imag_part(c)
    if b == 0:
        if a >= 0:
            return _rational_sqrt(a)
        s = _rational_sqrt(-a)
        return None if s is None else GaussianRational._make(mpq(0), s)
    modulus = _rational_sqrt(a * a + b * b)
    if modulus is None:
        return None
    x = _rational_sqrt((modulus + a) / 2)
    y = _rational_sqrt((modulus - a) / 2)
    if x is None or y is None:
        return None
    if b < 0:
        y = -y
    return GaussianRational._make(x, y)


def _denominator(c: Coefficient) -> int:
    return int(math.lcm(int(real_part(c).denominator), int(imag_part(c).denominator)))


def _to_mpf(q):
    return mpmath.mpf(int(q.numerator)) / int(q.denominator)


def exact_roots(c: Coefficient, k: int) -> list[Coefficient]:
    """All k-th roots of ``c`` lying in Q(i), sorted deterministically."""
    if k < 1:
        raise ValueError("root index must be >= 1")
    if k == 1:
        return [c]
    if c == 0:
        return [mpq(0)]
    candidates: list[Coefficient] = []
    if is_real(c):
        r = _rational_root(c, k)
        if r is not None:
            candidates.append(r)
            candidates.append(-r)
    bound = max(_denominator(c), 1)
    with mpmath.workdps(60):
        z = mpmath.mpc(_to_mpf(real_part(c)), _to_mpf(imag_part(c)))
        base = mpmath.root(z, k)
        for j in range(k):
            w = base * mpmath.expjpi(mpmath.mpf(2 * j) / k)
            re_f = Fraction(str(mpmath.nstr(w.real, 50))).limit_denominator(bound)
            im_f = Fraction(str(mpmath.nstr(w.imag, 50))).limit_denominator(bound)
            candidates.append(coeff(re_f, im_f))
    roots = []
    for cand in candidates:
        if cand ** k == c and cand not in roots:
            roots.append(cand)
    roots.sort(key=lambda v: (-(real_part(v)), -(imag_part(v))))
    return roots


def exact_root(c: Coefficient, k: int) -> Coefficient | None:
    """Preferred k-th root in Q(i): positive real if available, else the first found."""
    roots = exact_roots(c, k)
    return roots[0] if roots else None


def format_coeff(c) -> str:
    """Canonical text: ``3/4``, ``-2``, ``1/2+3/4i``, ``-i``."""
    a, b = real_part(c), imag_part(c)

    def fr(q):
        q = mpq(q)
        return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"

    if b == 0:
        return fr(a)
    if b == 1:
        im_s = "i"
    elif b == -1:
        im_s = "-i"
    else:
        im_s = fr(b) + "i"
    if a == 0:
        return im_s
    return fr(a) + ("" if im_s.startswith("-") else "+") + im_s


def approx(c) -> complex:
    """Float image of an exact coefficient (the declared exact→float frontier)."""
    return to_complex(c) if not isinstance(c, complex) else c


def phase_exp(mu) -> complex:
    """e^{2 i pi mu} as a float."""
    return cmath.exp(2j * math.pi * to_complex(mu))
