"""Exact functions on the model manifold T^a x R^b.

A :class:`ScalarFn` is a finite sum of terms

    c * exp(i <m, theta>) * z^e * t^p * s^q

with Gaussian-rational coefficients ``c``.  Reality is enforced by storing
conjugate coefficients at ``m`` and ``-m``.  Every term is addressed by a flat
integer key of length ``dim + 2``: the frequency vector, the z exponents and
the exponents of the formal parameters ``t`` and ``s``.  The key layout never
depends on which parameters a manifold declares, so functions with and without
parameters can be combined freely.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

PARAMETERS = ("t", "s")

Number = Union[int, Fraction]
Coeff = tuple  # (real part, imaginary part), both Fractions

_ZERO = Fraction(0)
_ONE = Fraction(1)


class ManifoldMismatch(ValueError):
    """Objects living on different model manifolds were combined."""


@dataclass(frozen=True)
class ModelManifold:
    """The model manifold T^a x R^b, optionally with formal parameters t, s."""

    torus_dim: int = 0
    affine_dim: int = 0
    parameters: tuple = ()

    def __post_init__(self):
        if self.torus_dim < 0 or self.affine_dim < 0:
            raise ValueError("manifold dimensions must be non-negative")
        params = tuple(self.parameters)
        for p in params:
            if p not in PARAMETERS:
                raise ValueError(f"unknown parameter {p!r}; allowed: {PARAMETERS}")
        if len(set(params)) != len(params):
            raise ValueError("duplicate parameter name")
        object.__setattr__(self, "parameters", tuple(p for p in PARAMETERS if p in params))

    @property
    def dim(self) -> int:
        return self.torus_dim + self.affine_dim

    @property
    def key_length(self) -> int:
        return self.dim + len(PARAMETERS)

    @property
    def coordinates(self) -> tuple:
        return tuple(f"theta{i + 1}" for i in range(self.torus_dim)) + tuple(
            f"z{j + 1}" for j in range(self.affine_dim)
        )

    def slot(self, name) -> int:
        """Key position of a coordinate (name or 0-based index) or parameter."""
        if isinstance(name, int):
            if not 0 <= name < self.dim:
                raise KeyError(f"coordinate index {name} out of range")
            return name
        if name in PARAMETERS:
            return self.dim + PARAMETERS.index(name)
        m = re.fullmatch(r"(theta|z)(\d+)", name)
        if m:
            i = int(m.group(2)) - 1
            if m.group(1) == "theta" and 0 <= i < self.torus_dim:
                return i
            if m.group(1) == "z" and 0 <= i < self.affine_dim:
                return self.torus_dim + i
        raise KeyError(f"unknown coordinate {name!r}")

    def is_theta(self, index: int) -> bool:
        return index < self.torus_dim

    def with_parameters(self, *names: str) -> ModelManifold:
        return ModelManifold(self.torus_dim, self.affine_dim, tuple(self.parameters) + tuple(
            n for n in names if n not in self.parameters))

    def join(self, other: ModelManifold) -> ModelManifold:
        if self is other or self == other:
            return self
        if (self.torus_dim, self.affine_dim) != (other.torus_dim, other.affine_dim):
            raise ManifoldMismatch(f"{self} vs {other}")
        return self.with_parameters(*other.parameters)

    def __str__(self):
        parts = [f"T^{self.torus_dim}" if self.torus_dim else "", f"R^{self.affine_dim}" if self.affine_dim else ""]
        text = " x ".join(p for p in parts if p) or "pt"
        if self.parameters:
            text += " [" + ",".join(self.parameters) + "]"
        return text


@dataclass(frozen=True)
class Point:
    """A point of T^a x R^b plus values of the formal parameters.

    ``theta`` holds multiples of pi; only quarter periods evaluate exactly.
    """

    theta: tuple = ()
    z: tuple = ()
    t: Fraction | None = None
    s: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "theta", tuple(Fraction(v) for v in self.theta))
        object.__setattr__(self, "z", tuple(Fraction(v) for v in self.z))
        for p in PARAMETERS:
            v = getattr(self, p)
            if v is not None:
                object.__setattr__(self, p, Fraction(v))

    def quarter_turns(self) -> tuple:
        turns = []
        for v in self.theta:
            q = v * 2
            if q.denominator != 1:
                raise ValueError(f"theta = {v}*pi is not a multiple of pi/2")
            turns.append(int(q) % 4)
        return tuple(turns)


def _canon_freq(m: tuple) -> tuple:
    for v in m:
        if v:
            return m if v > 0 else tuple(-x for x in m)
    return m


def _add_into(acc: dict, key: tuple, re_: Fraction, im_: Fraction) -> None:
    old = acc.get(key)
    if old is None:
        if re_ or im_:
            acc[key] = (re_, im_)
        return
    nr, ni = old[0] + re_, old[1] + im_
    if nr or ni:
        acc[key] = (nr, ni)
    else:
        del acc[key]


class ScalarFn:
    """Exact real function on a :class:`ModelManifold`; immutable."""

    __slots__ = ("manifold", "terms", "_hash")

    def __init__(self, manifold: ModelManifold, terms: Mapping | None = None, *, check: bool = True):
        self.manifold = manifold
        self._hash = None
        if not check:
            self.terms = dict(terms) if terms else {}
            return
        n = manifold.key_length
        clean: dict = {}
        for key, c in (terms or {}).items():
            key = tuple(int(k) for k in key)
            if len(key) != n:
                raise ValueError(f"term key {key} has length {len(key)}, expected {n}")
            if any(e < 0 for e in key[manifold.torus_dim:]):
                raise ValueError(f"negative exponent in {key}")
            if isinstance(c, tuple):
                re_, im_ = Fraction(c[0]), Fraction(c[1])
            else:
                re_, im_ = Fraction(c), _ZERO
            _add_into(clean, key, re_, im_)
        _check_reality(clean, manifold.torus_dim)
        self.terms = clean

    # -- constructors -------------------------------------------------
    @classmethod
    def _raw(cls, manifold: ModelManifold, terms: dict) -> ScalarFn:
        obj = cls.__new__(cls)
        obj.manifold = manifold
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, manifold: ModelManifold) -> ScalarFn:
        return cls._raw(manifold, {})

    @classmethod
    def constant(cls, manifold: ModelManifold, value: Number) -> ScalarFn:
        value = Fraction(value)
        if not value:
            return cls.zero(manifold)
        return cls._raw(manifold, {(0,) * manifold.key_length: (value, _ZERO)})

    @classmethod
    def variable(cls, manifold: ModelManifold, name: str) -> ScalarFn:
        """The coordinate function z_j, or a formal parameter t / s."""
        pos = manifold.slot(name)
        if pos < manifold.torus_dim:
            raise ValueError("theta coordinates are not global functions; use sin/cos")
        if name in PARAMETERS and name not in manifold.parameters:
            manifold = manifold.with_parameters(name)
        key = [0] * manifold.key_length
        key[pos] = 1
        return cls._raw(manifold, {tuple(key): (_ONE, _ZERO)})

    @classmethod
    def cos(cls, manifold: ModelManifold, freq: Iterable[int]) -> ScalarFn:
        return cls._trig(manifold, tuple(freq), (Fraction(1, 2), _ZERO), (Fraction(1, 2), _ZERO))

    @classmethod
    def sin(cls, manifold: ModelManifold, freq: Iterable[int]) -> ScalarFn:
        return cls._trig(manifold, tuple(freq), (_ZERO, Fraction(-1, 2)), (_ZERO, Fraction(1, 2)))

    @classmethod
    def _trig(cls, manifold, freq, plus, minus):
        if len(freq) != manifold.torus_dim:
            raise ValueError(f"frequency vector {freq} does not match torus dimension {manifold.torus_dim}")
        pad = (0,) * (manifold.affine_dim + len(PARAMETERS))
        if not any(freq):
            # cos(0) = 1, sin(0) = 0
            return cls.constant(manifold, plus[0] + minus[0])
        terms: dict = {}
        _add_into(terms, freq + pad, *plus)
        _add_into(terms, tuple(-m for m in freq) + pad, *minus)
        return cls._raw(manifold, terms)

    # -- basic protocol -----------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ScalarFn.constant(self.manifold, other)
        if not isinstance(other, ScalarFn):
            return NotImplemented
        if (self.manifold.torus_dim, self.manifold.affine_dim) != (
            other.manifold.torus_dim, other.manifold.affine_dim):
            return False
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.manifold.torus_dim, self.manifold.affine_dim, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"ScalarFn({str(self)!r})"

    def __str__(self):
        return format_scalar(self)

    # -- ring operations ----------------------------------------------
    def _coerce(self, other) -> ScalarFn | None:
        if isinstance(other, ScalarFn):
            return other
        if isinstance(other, (int, Fraction)):
            return ScalarFn.constant(self.manifold, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        manifold = self.manifold.join(other.manifold)
        if not other.terms:
            return self if manifold is self.manifold else ScalarFn._raw(manifold, self.terms)
        acc = dict(self.terms)
        for k, (r, i) in other.terms.items():
            _add_into(acc, k, r, i)
        return ScalarFn._raw(manifold, acc)

    __radd__ = __add__

    def __neg__(self):
        return ScalarFn._raw(self.manifold, {k: (-r, -i) for k, (r, i) in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Number) -> ScalarFn:
        c = Fraction(c)
        if not c:
            return ScalarFn.zero(self.manifold)
        return ScalarFn._raw(self.manifold, {k: (r * c, i * c) for k, (r, i) in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, ScalarFn):
            return NotImplemented
        manifold = self.manifold.join(other.manifold)
        acc: dict = {}
        for k1, (r1, i1) in self.terms.items():
            for k2, (r2, i2) in other.terms.items():
                key = tuple(a + b for a, b in zip(k1, k2))
                _add_into(acc, key, r1 * r2 - i1 * i2, r1 * i2 + i1 * r2)
        return ScalarFn._raw(manifold, acc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = ScalarFn.constant(self.manifold, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- calculus -----------------------------------------------------
    def partial(self, coord) -> ScalarFn:
        """Exact partial derivative along a coordinate or parameter."""
        pos = self.manifold.slot(coord)
        acc: dict = {}
        if pos < self.manifold.torus_dim:
            # d/dtheta_j e^{i<m,theta>} = i m_j e^{i<m,theta>}
            for k, (r, i) in self.terms.items():
                mj = k[pos]
                if mj:
                    acc[k] = (-i * mj, r * mj)
        else:
            for k, (r, i) in self.terms.items():
                e = k[pos]
                if e:
                    key = k[:pos] + (e - 1,) + k[pos + 1:]
                    _add_into(acc, key, r * e, i * e)
        return ScalarFn._raw(self.manifold, acc)

    def integrate_param(self, param: str) -> ScalarFn:
        """Definite integral over [0, 1] in a formal parameter."""
        pos = self.manifold.slot(param)
        if param not in PARAMETERS:
            raise ValueError(f"{param!r} is not a formal parameter")
        acc: dict = {}
        for k, (r, i) in self.terms.items():
            e = k[pos]
            key = k[:pos] + (0,) + k[pos + 1:]
            _add_into(acc, key, r / (e + 1), i / (e + 1))
        return ScalarFn._raw(self.manifold, acc)

    def substitute(self, param: str, value: Number) -> ScalarFn:
        """Set a formal parameter to a rational value."""
        if param not in PARAMETERS:
            raise ValueError(f"{param!r} is not a formal parameter")
        pos = self.manifold.slot(param)
        value = Fraction(value)
        acc: dict = {}
        for k, (r, i) in self.terms.items():
            e = k[pos]
            w = value ** e
            key = k[:pos] + (0,) + k[pos + 1:]
            _add_into(acc, key, r * w, i * w)
        return ScalarFn._raw(self.manifold, acc)

    def theta_average(self, coord) -> ScalarFn:
        """Average over the circle of a torus coordinate (its frequency-zero part)."""
        pos = self.manifold.slot(coord)
        if pos >= self.manifold.torus_dim:
            raise ValueError(f"{coord!r} is not a torus coordinate")
        return ScalarFn._raw(self.manifold, {k: c for k, c in self.terms.items() if k[pos] == 0})

    def eval_at(self, p: Point) -> Fraction:
        M = self.manifold
        if len(p.theta) != M.torus_dim or len(p.z) != M.affine_dim:
            raise ValueError(f"point {p} does not lie on {M}")
        turns = p.quarter_turns()
        a, b = M.torus_dim, M.affine_dim
        params = (p.t, p.s)
        total_r = total_i = _ZERO
        for k, (r, i) in self.terms.items():
            phase = sum(m * q for m, q in zip(k[:a], turns)) % 4
            w = _ONE
            for zv, e in zip(p.z, k[a:a + b]):
                if e:
                    w *= zv ** e
            for name, pv, e in zip(PARAMETERS, params, k[a + b:]):
                if e:
                    if pv is None:
                        raise ValueError(f"parameter {name} has no value at the point")
                    w *= pv ** e
            # multiply (r + i*I) by I**phase
            if phase == 0:
                rr, ii = r, i
            elif phase == 1:
                rr, ii = -i, r
            elif phase == 2:
                rr, ii = -r, -i
            else:
                rr, ii = i, -r
            total_r += rr * w
            total_i += ii * w
        if total_i:
            raise ArithmeticError("evaluation produced a non-real value; reality constraint broken")
        return total_r

    # -- inspection ---------------------------------------------------
    def depends_on(self, coord) -> bool:
        pos = self.manifold.slot(coord)
        return any(k[pos] for k in self.terms)

    def is_theta_free(self) -> bool:
        a = self.manifold.torus_dim
        return all(not any(k[:a]) for k in self.terms)

    def frequencies(self) -> set:
        a = self.manifold.torus_dim
        return {k[:a] for k in self.terms}


def _check_reality(terms: dict, a: int) -> None:
    for k, (r, i) in terms.items():
        m = k[:a]
        if not any(m):
            if i:
                raise ValueError(f"frequency-zero term {k} has an imaginary coefficient")
            continue
        conj = tuple(-x for x in m) + k[a:]
        if terms.get(conj) != (r, -i):
            raise ValueError(f"term {k} lacks its conjugate partner; function is not real")


# -- printing -------------------------------------------------------------

def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _format_angle(m: tuple) -> str:
    out = ""
    for j, c in enumerate(m):
        if not c:
            continue
        name = f"theta{j + 1}"
        mag = abs(c)
        piece = name if mag == 1 else f"{mag}*{name}"
        if not out:
            out = ("-" if c < 0 else "") + piece
        else:
            out += ("-" if c < 0 else "+") + piece
    return out


def _monomial_factors(manifold: ModelManifold, rest: tuple) -> list:
    a, b = manifold.torus_dim, manifold.affine_dim
    names = [f"z{j + 1}" for j in range(b)] + list(PARAMETERS)
    out = []
    for name, e in zip(names, rest):
        if e == 1:
            out.append(name)
        elif e > 1:
            out.append(f"{name}^{e}")
    return out


def scalar_monomials(f: ScalarFn) -> list:
    """Real monomials of ``f`` as (coefficient, factor strings) pairs, sorted."""
    a = f.manifold.torus_dim
    items = []
    seen = set()
    order = sorted(f.terms, key=lambda k: (sum(abs(x) for x in k[:a]), _canon_freq(k[:a]), k[a:], k[:a]))
    for k in order:
        m, rest = k[:a], k[a:]
        cm = _canon_freq(m)
        if (cm, rest) in seen:
            continue
        seen.add((cm, rest))
        factors = _monomial_factors(f.manifold, rest)
        if not any(m):
            items.append((f.terms[k][0], factors))
            continue
        r, i = f.terms.get(cm + rest, (_ZERO, _ZERO))
        angle = _format_angle(cm)
        if r:
            items.append((2 * r, factors + [f"cos({angle})"]))
        if i:
            items.append((-2 * i, factors + [f"sin({angle})"]))
    return items


def format_scalar(f: ScalarFn) -> str:
    items = scalar_monomials(f)
    if not items:
        return "0"
    pieces = []
    for coeff, factors in items:
        mag = abs(coeff)
        if factors:
            body = "*".join(factors) if mag == 1 else format_rational(mag) + "*" + "*".join(factors)
        else:
            body = format_rational(mag)
        pieces.append(("-" if coeff < 0 else "+", body))
    text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text
