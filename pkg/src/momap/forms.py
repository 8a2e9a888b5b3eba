"""Differential forms, vector fields and the Cartan calculus on T^a x R^b.

Coframe indices run over ``dtheta_1..dtheta_a, dz_1..dz_b`` (0-based, tori
first).  A form stores one :class:`ScalarFn` per strictly increasing index
tuple.  Forms of negative degree or degree above ``dim`` are allowed and are
always zero; this keeps degree bookkeeping uniform in formulas such as
``d iota(V) Omega`` when ``V`` is longer than the degree of ``Omega``.

Multivectors are decomposable only and are passed as sequences of
:class:`VectorField`.  Contraction follows the slot-filling convention

    iota(v_1 ^ ... ^ v_k) alpha = alpha(v_1, ..., v_k, ...)
                                = iota(v_k) ... iota(v_1) alpha.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .scalars import ModelManifold, ScalarFn, _add_into, _canon_freq, format_scalar

Coefficient = Union[int, Fraction, ScalarFn]


class NotClosed(ValueError):
    """A closed form was required."""


def sort_sign(indices: Iterable[int]) -> tuple:
    """Sort ``indices`` and return (sign of the permutation, sorted tuple).

    The sign is 0 when an index repeats.
    """
    idx = list(indices)
    sign = 1
    # insertion sort counting transpositions; tuples here are short
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(idx)):
        if idx[i] == idx[i - 1]:
            return 0, None
    return sign, tuple(idx)


def _as_scalar(manifold: ModelManifold, c: Coefficient) -> ScalarFn:
    if isinstance(c, ScalarFn):
        return c
    return ScalarFn.constant(manifold, c)


def _coframe_name(manifold: ModelManifold, i: int) -> str:
    if i < manifold.torus_dim:
        return f"dtheta{i + 1}"
    return f"dz{i - manifold.torus_dim + 1}"


def _frame_name(manifold: ModelManifold, i: int) -> str:
    if i < manifold.torus_dim:
        return f"par_theta{i + 1}"
    return f"par_z{i - manifold.torus_dim + 1}"


def _format_linear(manifold, items) -> str:
    """Format sum of coefficient * basis-name pairs."""
    if not items:
        return "0"
    pieces = []
    for coeff, name in items:
        text = format_scalar(coeff)
        if text == "1":
            pieces.append(("+", name))
        elif text == "-1":
            pieces.append(("-", name))
        elif " " in text:
            pieces.append(("+", f"({text})*{name}"))
        elif text.startswith("-"):
            pieces.append(("-", f"{text[1:]}*{name}"))
        else:
            pieces.append(("+", f"{text}*{name}"))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


class DifferentialForm:
    """Homogeneous differential form with exact coefficients; immutable."""

    __slots__ = ("manifold", "degree", "terms")

    def __init__(self, manifold: ModelManifold, degree: int, terms: Mapping | None = None):
        self.manifold = manifold
        self.degree = degree
        clean: dict = {}
        for idx, c in (terms or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError(f"index tuple {idx} does not match degree {degree}")
            if any(b <= a for a, b in zip(idx, idx[1:])):
                raise ValueError(f"index tuple {idx} is not strictly increasing")
            if idx and not (0 <= idx[0] and idx[-1] < manifold.dim):
                raise ValueError(f"index tuple {idx} out of range for {manifold}")
            c = _as_scalar(manifold, c)
            self.manifold = self.manifold.join(c.manifold)
            if c:
                clean[idx] = clean[idx] + c if idx in clean else c
                if not clean[idx]:
                    del clean[idx]
        self.terms = clean

    @classmethod
    def _raw(cls, manifold, degree, terms) -> DifferentialForm:
        obj = cls.__new__(cls)
        obj.manifold = manifold
        obj.degree = degree
        obj.terms = terms
        return obj

    @classmethod
    def zero(cls, manifold: ModelManifold, degree: int) -> DifferentialForm:
        return cls._raw(manifold, degree, {})

    @classmethod
    def scalar(cls, f: Coefficient, manifold: ModelManifold | None = None) -> DifferentialForm:
        if not isinstance(f, ScalarFn):
            f = ScalarFn.constant(manifold, f)
        return cls._raw(f.manifold, 0, {(): f} if f else {})

    @classmethod
    def coframe(cls, manifold: ModelManifold, coord) -> DifferentialForm:
        """The 1-form d(coord), e.g. ``coframe(M, "theta1")``."""
        i = manifold.slot(coord)
        if i >= manifold.dim:
            raise ValueError("parameters have no coframe element")
        return cls._raw(manifold, 1, {(i,): ScalarFn.constant(manifold, 1)})

    @classmethod
    def monomial(cls, manifold: ModelManifold, indices: Sequence[int], coeff: Coefficient = 1) -> DifferentialForm:
        """``coeff * dx_{i1} ^ ... ^ dx_{ik}`` for arbitrary index order."""
        sign, idx = sort_sign(indices)
        if not sign:
            return cls.zero(manifold, len(indices))
        c = _as_scalar(manifold, coeff)
        return cls(manifold, len(idx), {idx: c * sign})

    # -- protocol -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self.terms
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        if not self.terms and not other.terms:
            return True
        return self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.degree, frozenset(self.terms.items())))

    def __repr__(self):
        return f"DifferentialForm({self.degree}, {str(self)!r})"

    def __str__(self):
        items = []
        for idx in sorted(self.terms):
            name = "^".join(_coframe_name(self.manifold, i) for i in idx) if idx else "1"
            items.append((self.terms[idx], name))
        if self.degree == 0:
            return format_scalar(self.terms[()]) if self.terms else "0"
        return _format_linear(self.manifold, items)

    def coefficient(self, indices: Sequence[int]) -> ScalarFn:
        sign, idx = sort_sign(indices)
        if not sign or idx not in self.terms:
            return ScalarFn.zero(self.manifold)
        return self.terms[idx] * sign

    def as_scalar(self) -> ScalarFn:
        if self.degree != 0:
            raise ValueError(f"form of degree {self.degree} is not a function")
        return self.terms.get((), ScalarFn.zero(self.manifold))

    # -- linear structure ---------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        manifold = self.manifold.join(other.manifold)
        # a zero summand of any degree is neutral
        if not other.terms:
            return self if manifold is self.manifold else DifferentialForm._raw(manifold, self.degree, self.terms)
        if not self.terms:
            return DifferentialForm._raw(manifold, other.degree, other.terms)
        self._check_deg(other)
        acc = dict(self.terms)
        for idx, c in other.terms.items():
            if idx in acc:
                v = acc[idx] + c
                if v:
                    acc[idx] = v
                else:
                    del acc[idx]
            else:
                acc[idx] = c
        return DifferentialForm._raw(manifold, self.degree, acc)

    __radd__ = __add__

    def _check_deg(self, other):
        if self.degree != other.degree:
            raise ValueError(f"cannot add forms of degree {self.degree} and {other.degree}")
        return self

    def __neg__(self):
        return DifferentialForm._raw(self.manifold, self.degree, {i: -c for i, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return DifferentialForm.zero(self.manifold, self.degree)
            return DifferentialForm._raw(self.manifold, self.degree,
                                         {i: c.scale(other) for i, c in self.terms.items()})
        if isinstance(other, ScalarFn):
            acc = {}
            for i, c in self.terms.items():
                v = c * other
                if v:
                    acc[i] = v
            return DifferentialForm._raw(self.manifold.join(other.manifold), self.degree, acc)
        return NotImplemented

    __rmul__ = __mul__

    def map_coefficients(self, fn) -> DifferentialForm:
        """Apply a ScalarFn -> ScalarFn map to every coefficient."""
        acc = {}
        manifold = self.manifold
        for i, c in self.terms.items():
            v = fn(c)
            manifold = manifold.join(v.manifold)
            if v:
                acc[i] = v
        return DifferentialForm._raw(manifold, self.degree, acc)

    def substitute(self, param: str, value) -> DifferentialForm:
        return self.map_coefficients(lambda c: c.substitute(param, value))

    def integrate_param(self, param: str) -> DifferentialForm:
        return self.map_coefficients(lambda c: c.integrate_param(param))

    def partial_param(self, param: str) -> DifferentialForm:
        return self.map_coefficients(lambda c: c.partial(param))

    def wedge(self, other: DifferentialForm) -> DifferentialForm:
        return wedge(self, other)

    def d(self) -> DifferentialForm:
        return exterior_d(self)


class VectorField:
    """Vector field with exact components in the coordinate frame; immutable."""

    __slots__ = ("manifold", "components")

    def __init__(self, manifold: ModelManifold, components: Mapping | None = None):
        self.manifold = manifold
        clean = {}
        for j, c in (components or {}).items():
            if not isinstance(j, int):
                j = manifold.slot(j)
            if not 0 <= j < manifold.dim:
                raise ValueError(f"frame index {j} out of range")
            c = _as_scalar(manifold, c)
            self.manifold = self.manifold.join(c.manifold)
            if c:
                clean[j] = clean[j] + c if j in clean else c
                if not clean[j]:
                    del clean[j]
        self.components = clean

    @classmethod
    def _raw(cls, manifold, components) -> VectorField:
        obj = cls.__new__(cls)
        obj.manifold = manifold
        obj.components = components
        return obj

    @classmethod
    def zero(cls, manifold: ModelManifold) -> VectorField:
        return cls._raw(manifold, {})

    @classmethod
    def basis(cls, manifold: ModelManifold, coord) -> VectorField:
        """The coordinate field d/d(coord)."""
        return cls(manifold, {manifold.slot(coord): 1})

    def apply(self, f: ScalarFn) -> ScalarFn:
        """Directional derivative v(f)."""
        out = ScalarFn.zero(self.manifold.join(f.manifold))
        for j, c in self.components.items():
            g = f.partial(j)
            if g:
                out = out + c * g
        return out

    def component(self, j: int) -> ScalarFn:
        return self.components.get(j, ScalarFn.zero(self.manifold))

    def is_zero(self) -> bool:
        return not self.components

    def __bool__(self):
        return bool(self.components)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self.components
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(frozenset(self.components.items()))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        if not isinstance(other, VectorField):
            return NotImplemented
        acc = dict(self.components)
        for j, c in other.components.items():
            v = acc[j] + c if j in acc else c
            if v:
                acc[j] = v
            else:
                acc.pop(j, None)
        return VectorField._raw(self.manifold.join(other.manifold), acc)

    __radd__ = __add__

    def __neg__(self):
        return VectorField._raw(self.manifold, {j: -c for j, c in self.components.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ScalarFn)):
            acc = {}
            for j, c in self.components.items():
                v = c * other
                if v:
                    acc[j] = v
            m = self.manifold.join(other.manifold) if isinstance(other, ScalarFn) else self.manifold
            return VectorField._raw(m, acc)
        return NotImplemented

    __rmul__ = __mul__

    def map_coefficients(self, fn) -> VectorField:
        return VectorField(self.manifold, {j: fn(c) for j, c in self.components.items()})

    def substitute(self, param: str, value) -> VectorField:
        return self.map_coefficients(lambda c: c.substitute(param, value))

    def __repr__(self):
        return f"VectorField({str(self)!r})"

    def __str__(self):
        items = [(self.components[j], _frame_name(self.manifold, j)) for j in sorted(self.components)]
        return _format_linear(self.manifold, items)


Multivector = Sequence[VectorField]


# -- exterior algebra --------------------------------------------------------

def wedge(alpha: DifferentialForm, beta: DifferentialForm) -> DifferentialForm:
    manifold = alpha.manifold.join(beta.manifold)
    degree = alpha.degree + beta.degree
    acc: dict = {}
    for I, f in alpha.terms.items():
        for J, g in beta.terms.items():
            if set(I) & set(J):
                continue
            inversions = sum(1 for i in I for j in J if i > j)
            key = tuple(sorted(I + J))
            v = f * g
            if inversions % 2:
                v = -v
            if key in acc:
                v = acc[key] + v
                if v:
                    acc[key] = v
                else:
                    del acc[key]
            elif v:
                acc[key] = v
    return DifferentialForm._raw(manifold, degree, acc)


def _accumulate(acc: dict, key, value: ScalarFn) -> None:
    if not value:
        return
    if key in acc:
        v = acc[key] + value
        if v:
            acc[key] = v
        else:
            del acc[key]
    else:
        acc[key] = value


def exterior_d(alpha: DifferentialForm) -> DifferentialForm:
    M = alpha.manifold
    acc: dict = {}
    for I, f in alpha.terms.items():
        for j in range(M.dim):
            if j in I:
                continue
            g = f.partial(j)
            if not g:
                continue
            before = sum(1 for i in I if i < j)
            key = tuple(sorted(I + (j,)))
            _accumulate(acc, key, -g if before % 2 else g)
    return DifferentialForm._raw(M, alpha.degree + 1, acc)


def _contract_one(v: VectorField, alpha: DifferentialForm) -> DifferentialForm:
    manifold = alpha.manifold.join(v.manifold)
    acc: dict = {}
    if alpha.degree <= 0 or not v.components:
        return DifferentialForm.zero(manifold, alpha.degree - 1)
    for I, f in alpha.terms.items():
        for r, i in enumerate(I):
            c = v.components.get(i)
            if c is None:
                continue
            value = f * c
            _accumulate(acc, I[:r] + I[r + 1:], -value if r % 2 else value)
    return DifferentialForm._raw(manifold, alpha.degree - 1, acc)


def contract(V, alpha: DifferentialForm) -> DifferentialForm:
    """iota(v_1 ^ ... ^ v_k) alpha = alpha(v_1, ..., v_k, ...)."""
    if isinstance(V, VectorField):
        return _contract_one(V, alpha)
    out = alpha
    for v in V:
        out = _contract_one(v, out)
    return out


def lie_bracket(v: VectorField, w: VectorField) -> VectorField:
    """Commutator [v, w] of derivations."""
    manifold = v.manifold.join(w.manifold)
    comps = {}
    for j in set(v.components) | set(w.components):
        c = v.apply(w.component(j)) - w.apply(v.component(j))
        if c:
            comps[j] = c
    return VectorField._raw(manifold, comps)


def lie_derivative(v: VectorField, alpha: DifferentialForm) -> DifferentialForm:
    """Cartan's formula L_v = d iota_v + iota_v d."""
    return exterior_d(contract(v, alpha)) + contract(v, exterior_d(alpha))


def lie_derivative_multi(V: Multivector, alpha: DifferentialForm) -> DifferentialForm:
    """L_V alpha = d iota(V) alpha - (-1)^k iota(V) d alpha for V of length k."""
    k = len(V)
    second = contract(V, exterior_d(alpha))
    return exterior_d(contract(V, alpha)) + (second if k % 2 else -second)


def extended_cartan_residual(V: Multivector, omega: DifferentialForm) -> DifferentialForm:
    """Left minus right side of the extended Cartan formula; zero for a correct calculus.

    (-1)^k d iota(V) Omega
        = sum_{i<j} (-1)^{i+j} iota([v_i,v_j] ^ V without v_i, v_j) Omega
        + sum_i (-1)^i iota(V without v_i) L_{v_i} Omega
        + iota(V) d Omega
    with 1-based positions i, j.
    """
    k = len(V)
    if k < 2:
        raise ValueError("the extended formula needs at least two vector fields")
    V = list(V)
    lhs = exterior_d(contract(V, omega))
    if k % 2:
        lhs = -lhs
    rhs = contract(V, exterior_d(omega))
    for i in range(k):
        for j in range(i + 1, k):
            rest = [v for r, v in enumerate(V) if r not in (i, j)]
            term = contract([lie_bracket(V[i], V[j])] + rest, omega)
            rhs = rhs + (term if (i + j) % 2 == 0 else -term)
    for i in range(k):
        rest = V[:i] + V[i + 1:]
        term = contract(rest, lie_derivative(V[i], omega))
        # 1-based sign (-1)^(i+1)
        rhs = rhs + (term if i % 2 else -term)
    return lhs - rhs


# -- exactness -----------------------------------------------------------------

@dataclass(frozen=True)
class PrimitiveSearch:
    """Outcome of :func:`find_primitive`.

    Exactly one of ``primitive`` and ``harmonic`` describes the answer:
    ``harmonic`` is a nonzero constant-coefficient dtheta-form representing the
    de Rham class when the input is not exact.
    """

    form: DifferentialForm
    primitive: DifferentialForm | None
    harmonic: DifferentialForm | None

    @property
    def is_exact(self) -> bool:
        return self.harmonic is None


def _affine_homotopy(alpha: DifferentialForm) -> DifferentialForm:
    """Radial homotopy operator of the R^b factor (integration along z -> lambda*z)."""
    M = alpha.manifold
    a, b = M.torus_dim, M.affine_dim
    acc: dict = {}
    for I, f in alpha.terms.items():
        J = [i for i in I if i < a]
        K = [i for i in I if i >= a]
        if not K:
            continue
        scaled: dict = {}
        for key, (re_, im_) in f.terms.items():
            weight = sum(key[a:a + b]) + len(K)
            scaled[key] = (re_ / weight, im_ / weight)
        g = ScalarFn._raw(f.manifold, scaled)
        for r, kz in enumerate(K):
            sign = -1 if (len(J) + r) % 2 else 1
            zvar = ScalarFn.variable(M, kz)
            idx = tuple(i for i in I if i != kz)
            value = g * zvar
            _accumulate(acc, idx, -value if sign < 0 else value)
    return DifferentialForm._raw(M, alpha.degree - 1, acc)


def _restrict_to_torus(alpha: DifferentialForm) -> DifferentialForm:
    """Pull back along the zero section T^a -> T^a x R^b (then back to M)."""
    M = alpha.manifold
    a, b = M.torus_dim, M.affine_dim
    acc = {}
    for I, f in alpha.terms.items():
        if any(i >= a for i in I):
            continue
        kept = {k: c for k, c in f.terms.items() if not any(k[a:a + b])}
        if kept:
            acc[I] = ScalarFn._raw(f.manifold, kept)
    return DifferentialForm._raw(M, alpha.degree, acc)


def _torus_primitive(beta: DifferentialForm) -> tuple:
    """Split a closed z-free form into (primitive of the oscillating part, harmonic part)."""
    M = beta.manifold
    a = M.torus_dim
    prim: dict = {}
    harm: dict = {}
    for I, f in beta.terms.items():
        for key, (re_, im_) in f.terms.items():
            m = key[:a]
            if not any(m):
                harm.setdefault(I, {})[key] = (re_, im_)
                continue
            u = _canon_freq(m)
            dot = sum(x * y for x, y in zip(m, u))
            # coefficient / (i * dot)
            cr, ci = im_ / dot, -re_ / dot
            for r, i in enumerate(I):
                if not u[i]:
                    continue
                w = -u[i] if r % 2 else u[i]
                J = I[:r] + I[r + 1:]
                _add_into(prim.setdefault(J, {}), key, cr * w, ci * w)
    primitive = DifferentialForm(M, beta.degree - 1, {
        J: ScalarFn(M, t) for J, t in prim.items() if t})
    harmonic = DifferentialForm(M, beta.degree, {
        I: ScalarFn(M, t) for I, t in harm.items() if t})
    return primitive, harmonic


def find_primitive(alpha: DifferentialForm) -> PrimitiveSearch:
    """Decide exactness of a closed form on T^a x R^b constructively.

    Returns a primitive when one exists, otherwise the harmonic
    constant-coefficient representative of the (nonzero) class.
    """
    if exterior_d(alpha):
        raise NotClosed(f"form {alpha} is not closed")
    if alpha.degree <= 0:
        return PrimitiveSearch(alpha, None, alpha if alpha else None)
    affine_part = _affine_homotopy(alpha)
    rest = _restrict_to_torus(alpha)
    torus_part, harmonic = _torus_primitive(rest)
    if harmonic:
        return PrimitiveSearch(alpha, None, harmonic)
    return PrimitiveSearch(alpha, affine_part + torus_part, None)
