"""Input language for vector fields.

Grammar (version 1)::

    field   := expr                      (must evaluate to a vector)
    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" NATURAL)?
    atom    := NUMBER | "i" | "x" | "y" | "dx" | "dy" | NAME | "(" expr ")"

NUMBER is an unsigned integer or decimal literal (``3``, ``0.25``), read
exactly.  NAME is a binding supplied by the caller (``m=1/3``).  ``dx`` and
``dy`` stand for ∂x and ∂y; a field is a sum of scalar multiples of them.
Division is only allowed by series with nonzero constant term.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from gmpy2 import mpq

from .coeffs import I, coeff
from .errors import NonPolynomialDenominator, ParseError
from .series import TruncatedSeries2
from .vfield import PlanarVectorField

__all__ = [
    "GRAMMAR_VERSION",
    "Num",
    "Imag",
    "Var",
    "Name",
    "Marker",
    "Neg",
    "BinOp",
    "Pow",
    "parse",
    "to_text",
    "evaluate",
    "parse_field",
    "parse_bindings",
]

GRAMMAR_VERSION = 1
RESERVED = {"x", "y", "i", "dx", "dy"}


@dataclass(frozen=True)
class Num:
    text: str
    pos: int = 0

    def __eq__(self, other):
        return isinstance(other, Num) and self.text == other.text

    def __hash__(self):
        return hash(("Num", self.text))


@dataclass(frozen=True)
class Imag:
    pos: int = 0

    def __eq__(self, other):
        return isinstance(other, Imag)

    def __hash__(self):
        return hash("Imag")


@dataclass(frozen=True)
class Var:
    name: str  # "x" or "y"
    pos: int = 0

    def __eq__(self, other):
        return isinstance(other, Var) and self.name == other.name

    def __hash__(self):
        return hash(("Var", self.name))


@dataclass(frozen=True)
class Name:
    name: str
    pos: int = 0

    def __eq__(self, other):
        return isinstance(other, Name) and self.name == other.name

    def __hash__(self):
        return hash(("Name", self.name))


@dataclass(frozen=True)
class Marker:
    name: str  # "dx" or "dy"
    pos: int = 0

    def __eq__(self, other):
        return isinstance(other, Marker) and self.name == other.name

    def __hash__(self):
        return hash(("Marker", self.name))


@dataclass(frozen=True)
class Neg:
    operand: "Node"
    pos: int = 0

    def __eq__(self, other):
        return isinstance(other, Neg) and self.operand == other.operand

    def __hash__(self):
        return hash(("Neg", self.operand))


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"
    pos: int = 0

    def __eq__(self, other):
        return (isinstance(other, BinOp) and self.op == other.op and self.left == other.left
                and self.right == other.right)

    def __hash__(self):
        return hash((self.op, self.left, self.right))


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int
    pos: int = 0

    def __eq__(self, other):
        return isinstance(other, Pow) and self.base == other.base and self.exponent == other.exponent

    def __hash__(self):
        return hash(("Pow", self.base, self.exponent))


Node = Union[Num, Imag, Var, Name, Marker, Neg, BinOp, Pow]

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        t = self.take()
        if t[1] != value:
            what = "end of input" if t[0] == "end" else repr(t[1])
            raise ParseError(f"expected {value!r}, found {what}", t[2])
        return t

    def parse(self) -> Node:
        node = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected {t[1]!r}", t[2])
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            _, op, pos = self.take()
            node = BinOp(op, node, self.term(), pos)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, op, pos = self.take()
            node = BinOp(op, node, self.unary(), pos)
        return node

    def unary(self) -> Node:
        t = self.peek()
        if t[0] == "op" and t[1] == "-":
            self.take()
            return Neg(self.unary(), t[2])
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            e = self.take()
            if e[0] != "num" or "." in e[1]:
                raise ParseError("exponent must be a natural number", e[2])
            return Pow(base, int(e[1]), t[2])
        return base

    def atom(self) -> Node:
        kind, val, pos = self.take()
        if kind == "num":
            return Num(val, pos)
        if kind == "name":
            if val == "i":
                return Imag(pos)
            if val in ("x", "y"):
                return Var(val, pos)
            if val in ("dx", "dy"):
                return Marker(val, pos)
            return Name(val, pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        what = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {what}", pos)


def parse(text: str) -> Node:
    """Parse DSL text into an AST (positions are 0-based character offsets)."""
    return _Parser(text).parse()


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    return 5


def to_text(node: Node) -> str:
    """Canonical text; ``parse(to_text(ast)) == ast``."""
    if isinstance(node, Num):
        return node.text
    if isinstance(node, Imag):
        return "i"
    if isinstance(node, (Var, Name, Marker)):
        return node.name
    if isinstance(node, Neg):
        inner = to_text(node.operand)
        return f"-{inner}" if _prec(node.operand) >= 3 else f"-({inner})"
    if isinstance(node, Pow):
        base = to_text(node.base)
        if _prec(node.base) < 5:
            base = f"({base})"
        return f"{base}^{node.exponent}"
    if isinstance(node, BinOp):
        p = _PREC[node.op]
        left, right = to_text(node.left), to_text(node.right)
        if _prec(node.left) < p:
            left = f"({left})"
        if _prec(node.right) <= p:
            right = f"({right})"
        sep = f" {node.op} " if p == 1 else node.op
        return f"{left}{sep}{right}"
    raise TypeError(f"not an AST node: {node!r}")


@dataclass
class _Vec:
    fx: TruncatedSeries2
    fy: TruncatedSeries2


def _eval(node: Node, N: int, bindings: dict):
    if isinstance(node, Num):
        return TruncatedSeries2.constant(mpq(node.text), N)
    if isinstance(node, Imag):
        return TruncatedSeries2.constant(I, N)
    if isinstance(node, Var):
        return TruncatedSeries2.x(N) if node.name == "x" else TruncatedSeries2.y(N)
    if isinstance(node, Name):
        if node.name not in bindings:
            raise ParseError(f"unbound name {node.name!r}", node.pos)
        return TruncatedSeries2.constant(bindings[node.name], N)
    if isinstance(node, Marker):
        one, zero = TruncatedSeries2.one(N), TruncatedSeries2.zero(N)
        return _Vec(one, zero) if node.name == "dx" else _Vec(zero, one)
    if isinstance(node, Neg):
        v = _eval(node.operand, N, bindings)
        return _Vec(-v.fx, -v.fy) if isinstance(v, _Vec) else -v
    if isinstance(node, Pow):
        v = _eval(node.base, N, bindings)
        if isinstance(v, _Vec):
            raise ParseError("cannot raise dx/dy to a power", node.pos)
        return v ** node.exponent
    if isinstance(node, BinOp):
        a = _eval(node.left, N, bindings)
        b = _eval(node.right, N, bindings)
        va, vb = isinstance(a, _Vec), isinstance(b, _Vec)
        if node.op in "+-":
            if va != vb:
                raise ParseError("cannot add a scalar to a dx/dy term", node.pos)
            if va:
                return _Vec(a.fx + b.fx, a.fy + b.fy) if node.op == "+" else _Vec(a.fx - b.fx, a.fy - b.fy)
            return a + b if node.op == "+" else a - b
        if node.op == "*":
            if va and vb:
                raise ParseError("product of two dx/dy terms", node.pos)
            if va:
                return _Vec(a.fx * b, a.fy * b)
            if vb:
                return _Vec(b.fx * a, b.fy * a)
            return a * b
        # division by a unit
        if vb:
            raise ParseError("cannot divide by a dx/dy term", node.pos)
        if b.constant_term == 0:
            raise NonPolynomialDenominator("denominator vanishes at the origin", node.pos)
        inv = b.inverse()
        return _Vec(a.fx * inv, a.fy * inv) if va else a * inv
    raise TypeError(f"not an AST node: {node!r}")


def evaluate(node: Node, order: int, bindings: dict | None = None) -> PlanarVectorField:
    """Exact field of an AST, truncated at ``order``."""
    v = _eval(node, order, bindings or {})
    if not isinstance(v, _Vec):
        raise ParseError("expression has no dx/dy term", 0)
    return PlanarVectorField(v.fx, v.fy)


def parse_bindings(items) -> dict:
    """``["m=1/3", "c=1+2i"]`` → exact values."""
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ParseError(f"binding {item!r} is not name=value", 0)
        name, value = (s.strip() for s in item.split("=", 1))
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name) or name in RESERVED:
            raise ParseError(f"invalid binding name {name!r}", 0)
        try:
            out[name] = coeff(value)
        except (ValueError, TypeError) as exc:
            raise ParseError(f"binding {name!r}: {exc}", item.index("=") + 1) from exc
    return out


def parse_field(text: str, order: int, bindings: dict | None = None) -> PlanarVectorField:
    return evaluate(parse(text), order, bindings)
