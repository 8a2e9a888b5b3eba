"""Recursive-descent parser for the scenario expression language.

Grammar (``^`` followed by an integer literal is a power, otherwise a wedge)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "^") unary)*
    unary  := "-" unary | power
    power  := atom ("^" INT)*
    atom   := NUMBER | z<j> | t | s | dtheta<i> | dz<j> | par_theta<i> | par_z<j>
            | ("sin" | "cos") "(" angle ")" | "(" expr ")"
    angle  := ["-"] aterm (("+" | "-") aterm)*
    aterm  := [INT "*"] theta<i>

Bare theta coordinates are not functions on the torus, so they only appear
inside sin/cos.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .forms import DifferentialForm, VectorField, wedge
from .scalars import ModelManifold, ScalarFn


class ParseError(ValueError):
    def __init__(self, message: str, text: str = "", pos: int = 0):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        self.line, self.col, self.bare = line, col, message
        super().__init__(f"{line}:{col}: {message}")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^(),]))")


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", text, bad)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(Token(kind, m.group(kind), start))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


_INDEXED = re.compile(r"(dtheta|dz|par_theta|par_z|theta|z)([1-9]\d*)$")


class _Parser:
    def __init__(self, text: str, manifold: ModelManifold):
        self.text = text
        self.manifold = manifold
        self.tokens = tokenize(text)
        self.i = 0

    # -- helpers --------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if self.tok.text != text:
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(message, self.text, tok.pos)

    def zero_scalar(self) -> DifferentialForm:
        return DifferentialForm.zero(self.manifold, 0)

    # -- grammar --------------------------------------------------------
    def parse(self):
        if self.tok.kind == "end":
            self.error("empty expression")
        value = self.expr()
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.text!r}")
        return value

    def expr(self):
        value = self.term()
        while self.tok.text in ("+", "-"):
            op = self.advance()
            rhs = self.term()
            value = self.combine_add(value, rhs if op.text == "+" else _negate(rhs), op)
        return value

    def term(self):
        value = self.unary()
        while self.tok.text in ("*", "^"):
            op = self.advance()
            rhs = self.unary()
            value = self.combine_mul(value, rhs, op)
        return value

    def unary(self):
        if self.tok.text == "-":
            self.advance()
            return _negate(self.unary())
        if self.tok.text == "+":
            self.error("unary plus is not allowed")
        return self.power()

    def power(self):
        value = self.atom()
        while self.tok.text == "^" and self.peek().kind == "num" and "/" not in self.peek().text:
            op = self.advance()
            exponent = int(self.advance().text)
            if not (isinstance(value, DifferentialForm) and value.degree == 0) and value:
                self.error("only functions can be raised to a power", op)
            if not value:
                value = self.zero_scalar() if exponent else DifferentialForm.scalar(1, self.manifold)
                continue
            value = DifferentialForm.scalar(value.as_scalar() ** exponent)
        return value

    def atom(self):
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return DifferentialForm.scalar(Fraction(tok.text), self.manifold)
        if tok.text == "(":
            self.advance()
            value = self.expr()
            self.expect(")")
            return value
        if tok.kind != "name":
            self.error(f"unexpected {tok.text or 'end of input'!r}")
        name = tok.text
        if name in ("sin", "cos"):
            self.advance()
            self.expect("(")
            freq = self.angle()
            self.expect(")")
            fn = ScalarFn.sin if name == "sin" else ScalarFn.cos
            return DifferentialForm.scalar(fn(self.manifold, freq))
        if name in ("t", "s"):
            self.advance()
            return DifferentialForm.scalar(ScalarFn.variable(self.manifold, name))
        m = _INDEXED.match(name)
        if not m:
            self.error(f"unknown name {name!r}")
        kind, index = m.group(1), int(m.group(2))
        coord = self.coordinate(kind.removeprefix("par_").removeprefix("d"), index, tok)
        self.advance()
        if kind == "theta":
            self.error("theta coordinates may only appear inside sin(...) or cos(...)", tok)
        if kind == "z":
            return DifferentialForm.scalar(ScalarFn.variable(self.manifold, coord))
        if kind.startswith("d"):
            return DifferentialForm.coframe(self.manifold, coord)
        return VectorField.basis(self.manifold, coord)

    def coordinate(self, base: str, index: int, tok: Token) -> str:
        limit = self.manifold.torus_dim if base == "theta" else self.manifold.affine_dim
        if index > limit:
            self.error(f"{tok.text} does not exist on {self.manifold}", tok)
        return f"{base}{index}"

    def angle(self) -> tuple:
        freq = [0] * self.manifold.torus_dim
        sign = 1
        if self.tok.text == "-":
            self.advance()
            sign = -1
        while True:
            coeff = 1
            if self.tok.kind == "num":
                num = self.advance()
                if "/" in num.text:
                    self.error("angle coefficients must be integers", num)
                coeff = int(num.text)
                self.expect("*")
            tok = self.tok
            m = _INDEXED.match(tok.text) if tok.kind == "name" else None
            if not m or m.group(1) != "theta":
                self.error("expected theta<i> in an angle")
            index = int(m.group(2))
            self.coordinate("theta", index, tok)
            self.advance()
            freq[index - 1] += sign * coeff
            if self.tok.text in ("+", "-"):
                sign = 1 if self.advance().text == "+" else -1
                continue
            return tuple(freq)

    # -- semantics ------------------------------------------------------
    def combine_add(self, a, b, op: Token):
        if _is_zero(b):
            return a
        if _is_zero(a):
            return b
        if type(a) is not type(b):
            self.error("cannot add a vector field and a form", op)
        if isinstance(a, DifferentialForm) and a.degree != b.degree:
            self.error(f"cannot add forms of degree {a.degree} and {b.degree}", op)
        return a + b

    def combine_mul(self, a, b, op: Token):
        if op.text == "*":
            a_fn = isinstance(a, DifferentialForm) and a.degree == 0
            b_fn = isinstance(b, DifferentialForm) and b.degree == 0
            if not (a_fn or b_fn):
                self.error("'*' needs a function on one side; use '^' for the wedge product", op)
            if a_fn:
                return b * a.as_scalar() if isinstance(b, VectorField) else wedge(a, b)
            return a * b.as_scalar() if isinstance(a, VectorField) else wedge(a, b)
        if isinstance(a, VectorField) or isinstance(b, VectorField):
            self.error("the wedge product is defined on forms only", op)
        return wedge(a, b)


def _negate(v):
    return -v


def _is_zero(v) -> bool:
    return isinstance(v, DifferentialForm) and not v.terms and v.degree == 0


def parse_expression(text: str, manifold: ModelManifold):
    """Parse to a DifferentialForm (degree 0 for functions) or a VectorField."""
    return _Parser(str(text), manifold).parse()


def parse_scalar(text: str, manifold: ModelManifold) -> ScalarFn:
    return parse_form(text, manifold, 0).as_scalar()


def parse_form(text: str, manifold: ModelManifold, degree: int | None = None) -> DifferentialForm:
    value = parse_expression(text, manifold)
    if isinstance(value, VectorField):
        if not value:
            value = DifferentialForm.zero(manifold, 0)
        else:
            raise ParseError("expected a differential form, found a vector field", str(text), 0)
    if degree is not None:
        if not value.terms:
            return DifferentialForm.zero(value.manifold, degree)
        if value.degree != degree:
            raise ParseError(f"expected a form of degree {degree}, found degree {value.degree}", str(text), 0)
    return value


def parse_vector_field(text: str, manifold: ModelManifold) -> VectorField:
    value = parse_expression(text, manifold)
    if isinstance(value, DifferentialForm):
        if not value.terms:
            return VectorField.zero(value.manifold)
        raise ParseError("expected a vector field (par_theta<i>, par_z<j>)", str(text), 0)
    return value
