"""Lie algebra actions, the total complex of g-cochains with form values, and its cone.

A :class:`TotalCochain` of total degree N stores, for every strictly increasing
basis tuple of length k >= 1, a form of degree N - k.  The total differential
acts on the k-slice as d_g + (-1)^k d (Koszul convention).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .forms import (DifferentialForm, VectorField, contract, exterior_d, lie_bracket,
                    lie_derivative, sort_sign)
from .lie import CEFormCochain, LieAlgebra, ce_differential
from .scalars import ModelManifold
from .verdict import PreconditionError, Verdict


class ActionError(ValueError):
    """The generator assignment is not a Lie algebra morphism."""


class LieAction:
    """Infinitesimal action: basis element e_i acts by the vector field ``generators[i]``."""

    def __init__(self, algebra: LieAlgebra, generators: Sequence[VectorField],
                 manifold: ModelManifold | None = None, *, check: bool = True):
        if len(generators) != algebra.dim:
            raise ValueError(f"{len(generators)} generators given for a {algebra.dim}-dimensional algebra")
        if manifold is None:
            if not generators:
                raise ValueError("manifold required")
            manifold = generators[0].manifold
        for v in generators:
            manifold = manifold.join(v.manifold)
        self.algebra = algebra
        self.manifold = manifold
        self.generators = tuple(generators)
        if check:
            verdict = morphism_check(self)
            if not verdict.ok:
                raise ActionError(verdict.summary())

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def field(self, x: Sequence) -> VectorField:
        """v_x for x given by its coordinates in the basis."""
        out = VectorField.zero(self.manifold)
        for c, v in zip(x, self.generators):
            if c:
                out = out + v * Fraction(c)
        return out

    def fields(self, indices: Sequence[int]) -> list:
        return [self.generators[i] for i in indices]


def morphism_check(A: LieAction) -> Verdict:
    """[v_i, v_j] = sum_k c^k_ij v_k for all i < j."""
    verdict = Verdict("action morphism")
    L = A.algebra
    for i, j in combinations(range(L.dim), 2):
        lhs = lie_bracket(A.generators[i], A.generators[j])
        rhs = VectorField.zero(A.manifold)
        for k, c in L.bracket(i, j).items():
            rhs = rhs + A.generators[k] * c
        diff = lhs - rhs
        if diff:
            verdict.fail("morphism", (i, j), diff)
    return verdict


# -- invariance and equivariance ---------------------------------------------------

def invariance_check(sigma: DifferentialForm, A: LieAction) -> Verdict:
    """L_{v_i} sigma = 0 for every basis element."""
    verdict = Verdict("invariance")
    for i, v in enumerate(A.generators):
        L = lie_derivative(v, sigma)
        if L:
            verdict.fail("invariance", (i,), L)
    return verdict


def equivariance_check(F: Sequence[DifferentialForm], A: LieAction) -> Verdict:
    """L_{v_x} F(y) = F([x, y]) on all basis pairs, diagonal included."""
    verdict = Verdict("equivariance")
    n = A.dim
    if len(F) != n:
        raise ValueError(f"map given on {len(F)} basis elements, expected {n}")
    for i in range(n):
        for j in range(n):
            lhs = lie_derivative(A.generators[i], F[j])
            rhs = DifferentialForm.zero(A.manifold, F[j].degree)
            for k, c in A.algebra.bracket(i, j).items():
                rhs = rhs + F[k] * c
            diff = lhs - rhs
            if diff:
                verdict.fail("equivariance", (i, j), diff)
    return verdict


def self_contraction_check(F: Sequence[DifferentialForm], A: LieAction) -> Verdict:
    """iota_{v_x} F(x) = 0 for all x.

    The defect B(x, y) = iota_{v_x} F(y) + iota_{v_y} F(x) is symmetric bilinear,
    so checking basis elements and pairwise sums of basis elements is exact.
    """
    verdict = Verdict("self-contraction")
    n = A.dim
    diag = [contract(A.generators[i], F[i]) for i in range(n)]
    for i in range(n):
        if diag[i]:
            verdict.fail("self-contraction", (i,), diag[i])
    for i, j in combinations(range(n), 2):
        value = contract(A.generators[i] + A.generators[j], F[i] + F[j])
        if value:
            verdict.fail("self-contraction", (i, j), value, "on the sum of two basis elements")
    return verdict


# -- total cochains ------------------------------------------------------------------

class TotalCochain:
    """Element of the total complex, homogeneous of total degree ``total_degree``."""

    __slots__ = ("manifold", "dim", "total_degree", "values")

    def __init__(self, manifold: ModelManifold, dim: int, total_degree: int, values: Mapping | None = None):
        clean = {}
        for key, form in (values or {}).items():
            key = tuple(key)
            k = len(key)
            if not 1 <= k <= dim:
                raise ValueError(f"g-degree {k} out of range 1..{dim}")
            sign, skey = sort_sign(key)
            if not sign:
                continue
            if not form:
                manifold = manifold.join(form.manifold)
                continue
            if form.degree != total_degree - k:
                raise ValueError(f"value at {key} has form degree {form.degree}, "
                                 f"expected {total_degree - k}")
            if skey[-1] >= dim:
                raise ValueError(f"basis index in {key} out of range")
            manifold = manifold.join(form.manifold)
            value = form if sign > 0 else -form
            if skey in clean:
                value = clean[skey] + value
                if not value:
                    del clean[skey]
                    continue
            clean[skey] = value
        self.manifold = manifold
        self.dim = dim
        self.total_degree = total_degree
        self.values = clean

    @classmethod
    def zero(cls, manifold: ModelManifold, dim: int, total_degree: int) -> TotalCochain:
        return cls(manifold, dim, total_degree)

    @classmethod
    def from_components(cls, manifold, dim, total_degree, components: Mapping) -> TotalCochain:
        values = {}
        for c in components.values():
            values.update(c.values)
        return cls(manifold, dim, total_degree, values)

    def form_degree(self, k: int) -> int:
        return self.total_degree - k

    def value(self, indices: Sequence[int]) -> DifferentialForm:
        sign, key = sort_sign(indices)
        zero = DifferentialForm.zero(self.manifold, self.total_degree - len(indices))
        if not sign or key not in self.values:
            return zero
        v = self.values[key]
        return v if sign > 0 else -v

    def component(self, k: int) -> CEFormCochain:
        return CEFormCochain(self.manifold, self.dim, k, self.total_degree - k,
                             {key: v for key, v in self.values.items() if len(key) == k})

    def slice(self, k: int) -> TotalCochain:
        return TotalCochain(self.manifold, self.dim, self.total_degree,
                            {key: v for key, v in self.values.items() if len(key) == k})

    def slices(self) -> list:
        return sorted({len(k) for k in self.values})

    def __bool__(self):
        return bool(self.values)

    def __eq__(self, other):
        if not isinstance(other, TotalCochain):
            return NotImplemented
        return self.values == other.values and (self.total_degree == other.total_degree or not self.values)

    def __hash__(self):
        return hash(frozenset(self.values.items()))

    def _compatible(self, other: TotalCochain) -> int:
        if self.dim != other.dim:
            raise ValueError("cochains over algebras of different dimension")
        if not other.values:
            return self.total_degree
        if not self.values:
            return other.total_degree
        if self.total_degree != other.total_degree:
            raise ValueError(f"cannot add total degrees {self.total_degree} and {other.total_degree}")
        return self.total_degree

    def __add__(self, other):
        if not isinstance(other, TotalCochain):
            return NotImplemented
        deg = self._compatible(other)
        acc = dict(self.values)
        for k, v in other.values.items():
            acc[k] = acc[k] + v if k in acc else v
        return TotalCochain(self.manifold.join(other.manifold), self.dim, deg, acc)

    def __neg__(self):
        return self.map_forms(lambda f: -f)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return self.map_forms(lambda f: f * c)

    __rmul__ = __mul__

    def map_forms(self, fn, total_degree: int | None = None) -> TotalCochain:
        deg = self.total_degree if total_degree is None else total_degree
        return TotalCochain(self.manifold, self.dim, deg, {k: fn(v) for k, v in self.values.items()})

    def map_slices(self, fn) -> TotalCochain:
        """Apply ``fn(k, form)`` to every value of the k-slice."""
        return TotalCochain(self.manifold, self.dim, self.total_degree,
                            {k: fn(len(k), v) for k, v in self.values.items()})

    def substitute(self, param: str, value) -> TotalCochain:
        return self.map_forms(lambda f: f.substitute(param, value))

    def integrate_param(self, param: str) -> TotalCochain:
        return self.map_forms(lambda f: f.integrate_param(param))

    def partial_param(self, param: str) -> TotalCochain:
        return self.map_forms(lambda f: f.partial_param(param))

    def __repr__(self):
        return f"TotalCochain(deg={self.total_degree}, {format_cochain(self)})"


def format_cochain(c: TotalCochain) -> str:
    if not c.values:
        return "0"
    parts = []
    for key in sorted(c.values, key=lambda k: (len(k), k)):
        label = ",".join(str(i + 1) for i in key)
        parts.append(f"({label}): {c.values[key]}")
    return "{" + "; ".join(parts) + "}"


def total_differential(phi: TotalCochain, algebra: LieAlgebra) -> TotalCochain:
    """d_tot = d_g + (-1)^k d on the k-slice."""
    values: dict = {}
    for k in phi.slices():
        comp = phi.component(k)
        dd = comp.map(exterior_d, comp.form_degree + 1)
        if k % 2:
            dd = -dd
        for part in (ce_differential(comp, algebra), dd):
            for key, v in part.values.items():
                values[key] = values[key] + v if key in values else v
    return TotalCochain(phi.manifold, phi.dim, phi.total_degree + 1, values)


# -- contraction cochains and the tilde maps -------------------------------------------

def contraction_cochain(sigma: DifferentialForm, A: LieAction, k: int) -> CEFormCochain:
    """(x_1..x_k) -> iota(v_{x_1} ^ ... ^ v_{x_k}) sigma on increasing basis tuples."""
    values = {}
    if 1 <= k <= A.dim:
        for tup in combinations(range(A.dim), k):
            v = contract(A.fields(tup), sigma)
            if v:
                values[tup] = v
    return CEFormCochain(A.manifold.join(sigma.manifold), A.dim, k, sigma.degree - k, values)


class NotInvariant(PreconditionError):
    pass


def tilde_form(sigma: DifferentialForm, A: LieAction) -> TotalCochain:
    """sum_k (-1)^(k-1) sigma_k for an invariant form sigma."""
    verdict = invariance_check(sigma, A)
    if not verdict.ok:
        raise NotInvariant(verdict.summary(), verdict.failures[0])
    return _tilde_unchecked(sigma, A)


def _tilde_unchecked(sigma: DifferentialForm, A: LieAction) -> TotalCochain:
    N = sigma.degree
    values = {}
    for k in range(1, min(N, A.dim) + 1):
        comp = contraction_cochain(sigma, A, k)
        for key, v in comp.values.items():
            values[key] = v if k % 2 else -v
    return TotalCochain(A.manifold.join(sigma.manifold), A.dim, N, values)


def tilde_equivariant(F: Sequence[DifferentialForm], A: LieAction) -> TotalCochain:
    """F~ with k-slice (x_1..x_k) -> iota(v_{x_1} ^ ... ^ v_{x_{k-1}}) F(x_k).

    Requires F equivariant and iota_{v_x} F(x) = 0 for all x; total degree N + 1
    for F valued in N-forms.
    """
    if len(F) != A.dim:
        raise ValueError(f"map given on {len(F)} basis elements, expected {A.dim}")
    degrees = {f.degree for f in F if f}
    if len(degrees) > 1:
        raise ValueError("map values have mixed degrees")
    verdict = Verdict("equivariant extension preconditions")
    verdict.extend(equivariance_check(F, A)).extend(self_contraction_check(F, A))
    if not verdict.ok:
        raise PreconditionError(verdict.summary(), verdict.failures[0])
    N = degrees.pop() if degrees else F[0].degree
    manifold = A.manifold
    for f in F:
        manifold = manifold.join(f.manifold)
    values = {}
    for k in range(1, min(N + 1, A.dim) + 1):
        for tup in combinations(range(A.dim), k):
            v = contract(A.fields(tup[:-1]), F[tup[-1]])
            if v:
                values[tup] = v
    return TotalCochain(manifold, A.dim, N + 1, values)


# -- cone complex ------------------------------------------------------------------

class ConeElement:
    """Pair (sigma[1], phi) with sigma an invariant form; degree = deg(sigma) - 1."""

    __slots__ = ("shifted_form", "cochain")

    def __init__(self, shifted_form: DifferentialForm, cochain: TotalCochain):
        if cochain.values and shifted_form.terms and cochain.total_degree != shifted_form.degree - 1:
            raise ValueError("cone element components have inconsistent degrees")
        self.shifted_form = shifted_form
        self.cochain = cochain

    @property
    def degree(self) -> int:
        return self.shifted_form.degree - 1

    def __eq__(self, other):
        if not isinstance(other, ConeElement):
            return NotImplemented
        return self.shifted_form == other.shifted_form and self.cochain == other.cochain

    def __bool__(self):
        return bool(self.shifted_form) or bool(self.cochain)

    def __sub__(self, other):
        return ConeElement(self.shifted_form - other.shifted_form, self.cochain - other.cochain)

    def __repr__(self):
        return f"ConeElement({self.shifted_form}, {format_cochain(self.cochain)})"


def cone_differential(e: ConeElement, A: LieAction) -> ConeElement:
    """D(sigma[1], phi) = (d sigma [1], sigma~ - d_tot phi)."""
    sigma = e.shifted_form
    tilde = tilde_form(sigma, A)
    return ConeElement(exterior_d(sigma), tilde - total_differential(e.cochain, A.algebra))
