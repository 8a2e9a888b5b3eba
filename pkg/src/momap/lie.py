"""Finite-dimensional Lie algebras over Q and Chevalley-Eilenberg cochains.

Basis elements are 0-based internally; scenario files use 1-based labels.
Cochains are stored on strictly increasing basis tuples and extended to
arbitrary tuples by antisymmetry.  The Chevalley-Eilenberg differential uses
trivial coefficients, also for form-valued cochains:

    (d phi)(x_0, ..., x_k) = sum_{i<j} (-1)^{i+j} phi([x_i, x_j], x_0, ..^i..^j.., x_k)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Mapping, Sequence

from . import linalg
from .forms import DifferentialForm, NotClosed, sort_sign
from .scalars import ModelManifold


class JacobiError(ValueError):
    """Structure constants violate the Jacobi identity."""

    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"Jacobi identity fails on basis triple {witness.triple}: {witness.value}")


@dataclass(frozen=True)
class JacobiViolation:
    triple: tuple
    value: tuple


class LieAlgebra:
    """Lie algebra with basis e_0..e_{dim-1} and rational structure constants."""

    def __init__(self, dim: int, brackets: Mapping | None = None, *, check: bool = True):
        if dim < 1:
            raise ValueError("Lie algebra dimension must be positive")
        self.dim = dim
        table = {}
        for (i, j), vec in (brackets or {}).items():
            vec = tuple(Fraction(c) for c in vec)
            if len(vec) != dim:
                raise ValueError(f"bracket [{i},{j}] has {len(vec)} coordinates, expected {dim}")
            if not (0 <= i < dim and 0 <= j < dim) or i == j:
                raise ValueError(f"invalid bracket index pair ({i}, {j})")
            if i > j:
                i, j, vec = j, i, tuple(-c for c in vec)
            if (i, j) in table:
                raise ValueError(f"bracket [{i},{j}] given twice")
            if any(vec):
                table[(i, j)] = vec
        self.structure = table
        self._sparse = {}
        for (i, j), vec in table.items():
            sp = {l: c for l, c in enumerate(vec) if c}
            self._sparse[(i, j)] = sp
            self._sparse[(j, i)] = {l: -c for l, c in sp.items()}
        if check:
            bad = jacobi_check(self)
            if bad is not None:
                raise JacobiError(bad)

    @classmethod
    def from_triples(cls, dim: int, triples: Sequence, *, check: bool = True) -> LieAlgebra:
        """Build from 1-based ``(i, j, coefficient vector)`` triples."""
        return cls(dim, {(i - 1, j - 1): vec for i, j, vec in triples}, check=check)

    @classmethod
    def abelian(cls, dim: int) -> LieAlgebra:
        return cls(dim)

    def bracket(self, i: int, j: int) -> dict:
        """[e_i, e_j] as a sparse {index: coefficient} dict."""
        return self._sparse.get((i, j), {})

    def bracket_vectors(self, x: Sequence, y: Sequence) -> tuple:
        out = [Fraction(0)] * self.dim
        for (i, j), sp in self._sparse.items():
            c = Fraction(x[i]) * Fraction(y[j])
            if c:
                for l, v in sp.items():
                    out[l] += c * v
        return tuple(out)

    def is_abelian(self) -> bool:
        return not self.structure

    def __eq__(self, other):
        return isinstance(other, LieAlgebra) and self.dim == other.dim and self.structure == other.structure

    def __hash__(self):
        return hash((self.dim, frozenset(self.structure.items())))

    def __repr__(self):
        return f"LieAlgebra(dim={self.dim}, brackets={self.structure})"


def jacobi_check(L: LieAlgebra) -> JacobiViolation | None:
    """First basis triple on which the Jacobi identity fails, or None."""
    n = L.dim

    def br(x, y):
        return L.bracket_vectors(x, y)

    basis = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    for i, j, k in combinations(range(n), 3):
        a, b, c = basis[i], basis[j], basis[k]
        total = [p + q + r for p, q, r in zip(br(br(a, b), c), br(br(b, c), a), br(br(c, a), b))]
        if any(total):
            return JacobiViolation((i, j, k), tuple(total))
    return None


def heisenberg() -> LieAlgebra:
    """[e_0, e_1] = e_2."""
    return LieAlgebra(3, {(0, 1): (0, 0, 1)})


def so3() -> LieAlgebra:
    """[e_0, e_1] = e_2 and cyclic."""
    return LieAlgebra(3, {(0, 1): (0, 0, 1), (1, 2): (1, 0, 0), (0, 2): (0, -1, 0)})


def aff1() -> LieAlgebra:
    """[e_0, e_1] = e_0."""
    return LieAlgebra(2, {(0, 1): (1, 0)})


# -- cochains ------------------------------------------------------------------

def _alt_value(values: Mapping, indices, zero):
    sign, key = sort_sign(indices)
    if not sign or key not in values:
        return zero
    v = values[key]
    return v if sign > 0 else -v


def _check_keys(values: Mapping, dim: int, degree: int):
    for key in values:
        if len(key) != degree or any(b <= a for a, b in zip(key, key[1:])):
            raise ValueError(f"cochain key {key} is not an increasing {degree}-tuple")
        if key and not (0 <= key[0] and key[-1] < dim):
            raise ValueError(f"cochain key {key} out of range for dimension {dim}")


class CEScalarCochain:
    """Element of Lambda^k g^* with rational values."""

    __slots__ = ("dim", "degree", "values")

    def __init__(self, dim: int, degree: int, values: Mapping | None = None):
        vals = {tuple(k): Fraction(v) for k, v in (values or {}).items()}
        _check_keys(vals, dim, degree)
        self.dim = dim
        self.degree = degree
        self.values = {k: v for k, v in vals.items() if v}

    def __call__(self, *indices) -> Fraction:
        return _alt_value(self.values, indices, Fraction(0))

    def __bool__(self):
        return bool(self.values)

    def __eq__(self, other):
        if not isinstance(other, CEScalarCochain):
            return NotImplemented
        return self.values == other.values and (self.degree == other.degree or not self.values)

    def __add__(self, other):
        acc = dict(self.values)
        for k, v in other.values.items():
            acc[k] = acc.get(k, 0) + v
        return CEScalarCochain(self.dim, self.degree, acc)

    def __neg__(self):
        return CEScalarCochain(self.dim, self.degree, {k: -v for k, v in self.values.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return CEScalarCochain(self.dim, self.degree, {k: v * c for k, v in self.values.items()})

    __rmul__ = __mul__

    def vector(self) -> list:
        return [self.values.get(k, Fraction(0)) for k in combinations(range(self.dim), self.degree)]

    @classmethod
    def from_vector(cls, dim: int, degree: int, vec: Sequence) -> CEScalarCochain:
        return cls(dim, degree, dict(zip(combinations(range(dim), degree), vec)))

    def __repr__(self):
        return f"CEScalarCochain({self.degree}, {format_ce(self)})"


class CEFormCochain:
    """Element of Lambda^k g^* (x) Omega^m(M): forms on increasing basis tuples."""

    __slots__ = ("manifold", "dim", "degree", "form_degree", "values")

    def __init__(self, manifold: ModelManifold, dim: int, degree: int, form_degree: int, values: Mapping | None = None):
        vals = {}
        for k, form in (values or {}).items():
            k = tuple(k)
            if form.terms and form.degree != form_degree:
                raise ValueError(f"value at {k} has degree {form.degree}, expected {form_degree}")
            manifold = manifold.join(form.manifold)
            if form:
                vals[k] = form
        _check_keys(vals, dim, degree)
        self.manifold = manifold
        self.dim = dim
        self.degree = degree
        self.form_degree = form_degree
        self.values = vals

    def zero_form(self) -> DifferentialForm:
        return DifferentialForm.zero(self.manifold, self.form_degree)

    def __call__(self, *indices) -> DifferentialForm:
        return _alt_value(self.values, indices, self.zero_form())

    def __bool__(self):
        return bool(self.values)

    def __eq__(self, other):
        if not isinstance(other, CEFormCochain):
            return NotImplemented
        return self.values == other.values

    def __add__(self, other):
        acc = dict(self.values)
        for k, v in other.values.items():
            acc[k] = acc[k] + v if k in acc else v
        return CEFormCochain(self.manifold, self.dim, self.degree, self.form_degree, acc)

    def __neg__(self):
        return self.map(lambda f: -f)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return self.map(lambda f: f * c)

    __rmul__ = __mul__

    def map(self, fn, form_degree: int | None = None) -> CEFormCochain:
        deg = self.form_degree if form_degree is None else form_degree
        return CEFormCochain(self.manifold, self.dim, self.degree, deg,
                             {k: fn(v) for k, v in self.values.items()})

    def __repr__(self):
        inner = ", ".join(f"{tuple(i + 1 for i in k)}: {v}" for k, v in sorted(self.values.items()))
        return f"CEFormCochain(k={self.degree}, m={self.form_degree}, {{{inner}}})"


def _ce_apply(L: LieAlgebra, values: Mapping, degree: int, zero):
    out = {}
    for tup in combinations(range(L.dim), degree + 1):
        acc = zero
        for a in range(degree + 1):
            for b in range(a + 1, degree + 1):
                br = L.bracket(tup[a], tup[b])
                if not br:
                    continue
                rest = tup[:a] + tup[a + 1:b] + tup[b + 1:]
                sign = -1 if (a + b) % 2 else 1
                for l, c in br.items():
                    s, key = sort_sign((l,) + rest)
                    if s and key in values:
                        acc = acc + values[key] * (sign * s * c)
        if acc:
            out[tup] = acc
    return out


def ce_differential(c, L: LieAlgebra):
    """Chevalley-Eilenberg differential with trivial coefficients."""
    if c.dim != L.dim:
        raise ValueError("cochain and Lie algebra dimensions differ")
    if isinstance(c, CEScalarCochain):
        return CEScalarCochain(L.dim, c.degree + 1, _ce_apply(L, c.values, c.degree, Fraction(0)))
    if isinstance(c, CEFormCochain):
        zero = DifferentialForm.zero(c.manifold, c.form_degree)
        return CEFormCochain(c.manifold, L.dim, c.degree + 1, c.form_degree,
                             _ce_apply(L, c.values, c.degree, zero))
    raise TypeError(f"not a cochain: {c!r}")


def ce_matrix(L: LieAlgebra, k: int) -> list:
    """Matrix of d: Lambda^k -> Lambda^{k+1} in the increasing-tuple bases."""
    rows_basis = list(combinations(range(L.dim), k + 1))
    cols = []
    for tup in combinations(range(L.dim), k):
        image = ce_differential(CEScalarCochain(L.dim, k, {tup: 1}), L)
        cols.append([image.values.get(r, Fraction(0)) for r in rows_basis])
    if not cols:
        return [[] for _ in rows_basis]
    return linalg.transpose(cols) if rows_basis else []


def _rank_d(L: LieAlgebra, k: int) -> int:
    if k < 0 or k >= L.dim:
        return 0
    return linalg.rank(ce_matrix(L, k))


def ce_cohomology_dims(L: LieAlgebra) -> list:
    """Betti numbers dim H^k_CE(g), k = 0..dim."""
    return [comb(L.dim, k) - _rank_d(L, k) - _rank_d(L, k - 1) for k in range(L.dim + 1)]


@dataclass(frozen=True)
class ClassCertificate:
    """A functional on Lambda^k g^* killing coboundaries but not the cocycle."""

    functional: CEScalarCochain
    pairing: Fraction


@dataclass(frozen=True)
class CoboundarySearch:
    cochain: CEScalarCochain
    primitive: CEScalarCochain | None
    certificate: ClassCertificate | None

    @property
    def is_coboundary(self) -> bool:
        return self.certificate is None


def pair(functional: CEScalarCochain, c: CEScalarCochain) -> Fraction:
    return sum((functional.values.get(k, 0) * v for k, v in c.values.items()), Fraction(0))


def ce_is_coboundary(c: CEScalarCochain, L: LieAlgebra) -> CoboundarySearch:
    """Solve d b = c exactly, or certify that the class of c is nonzero."""
    if ce_differential(c, L):
        raise NotClosed("cochain is not d_g-closed")
    k = c.degree
    if k == 0 or k > L.dim:
        if not c:
            return CoboundarySearch(c, CEScalarCochain(L.dim, max(k - 1, 0)), None)
        functional = CEScalarCochain(L.dim, k, {(): 1})
        return CoboundarySearch(c, None, ClassCertificate(functional, pair(functional, c)))
    D = ce_matrix(L, k - 1)
    target = c.vector()
    sol = linalg.solve(D, target, ncols=comb(L.dim, k - 1))
    if sol is not None:
        return CoboundarySearch(c, CEScalarCochain.from_vector(L.dim, k - 1, sol), None)
    # left null vectors of D pair to zero with every coboundary
    for lam in linalg.nullspace(linalg.transpose(D), ncols=len(target)) if D and D[0] else \
            [[Fraction(int(i == j)) for j in range(len(target))] for i in range(len(target))]:
        value = sum((x * y for x, y in zip(lam, target)), Fraction(0))
        if value:
            functional = CEScalarCochain.from_vector(L.dim, k, lam)
            return CoboundarySearch(c, None, ClassCertificate(functional, value))
    raise AssertionError("inconsistent system without a separating functional")


def ce_cohomology_basis(L: LieAlgebra, k: int) -> list:
    """Cocycles whose classes form a basis of H^k_CE(g)."""
    n = comb(L.dim, k)
    Z = linalg.nullspace(ce_matrix(L, k), ncols=n) if k < L.dim else \
        [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    B = []
    if k >= 1:
        D = ce_matrix(L, k - 1)
        B = linalg.transpose(D) if D and D[0] else []
    span = [list(b) for b in B]
    r = linalg.rank(span) if span else 0
    reps = []
    for z in Z:
        trial = span + [z]
        rr = linalg.rank(trial)
        if rr > r:
            span, r = trial, rr
            reps.append(CEScalarCochain.from_vector(L.dim, k, z))
    return reps


def format_ce(c: CEScalarCochain) -> str:
    """Human form such as ``e1*^e2* - 2*e3*`` (1-based)."""
    if not c.values:
        return "0"
    parts = []
    for key in sorted(c.values):
        v = c.values[key]
        basis = "^".join(f"e{i + 1}*" for i in key) or "1"
        mag = abs(v)
        body = basis if mag == 1 else f"{mag}*{basis}"
        parts.append(("-" if v < 0 else "+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for s, b in parts[1:]:
        out += f" {s} {b}"
    return out
