"""Cartan model of equivariant forms at the Lie-algebra level.

An element is a polynomial in the degree-2 generators xi^1..xi^r with form
coefficients.  The differential is d_G = d (x) 1 - sum_i iota_{v_i} (x) xi^i,
and invariance means invariance under L_{v_x} on forms combined with the
coadjoint action on the polynomial part.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

from .complex import (LieAction, TotalCochain, equivariance_check, invariance_check,
                      self_contraction_check, tilde_equivariant)
from .forms import DifferentialForm, VectorField, contract, exterior_d, lie_bracket, lie_derivative
from .momentmap import MomentMapCandidate, bridge_sign
from .scalars import ModelManifold
from .verdict import CrossCheckError, PreconditionError, Verdict


class CartanElement:
    """sum over exponent vectors e of (form_e) * xi^e, homogeneous in total degree."""

    __slots__ = ("manifold", "dim", "terms")

    def __init__(self, manifold: ModelManifold, dim: int, terms: Mapping | None = None):
        clean = {}
        for exps, form in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != dim or any(e < 0 for e in exps):
                raise ValueError(f"bad xi exponent vector {exps}")
            manifold = manifold.join(form.manifold)
            if not form:
                continue
            if exps in clean:
                form = clean[exps] + form
                if not form:
                    del clean[exps]
                    continue
            clean[exps] = form
        degrees = {f.degree + 2 * sum(e) for e, f in clean.items()}
        if len(degrees) > 1:
            raise ValueError(f"inhomogeneous Cartan element (degrees {sorted(degrees)})")
        self.manifold = manifold
        self.dim = dim
        self.terms = clean

    @classmethod
    def from_pair(cls, omega: DifferentialForm, mu: Sequence[DifferentialForm]) -> CartanElement:
        """omega (x) 1 - sum_i mu(e_i) (x) xi^i."""
        dim = len(mu)
        terms = {(0,) * dim: omega}
        for i, m in enumerate(mu):
            terms[_unit(dim, i)] = -m
        return cls(omega.manifold, dim, terms)

    @classmethod
    def from_forms_linear(cls, alpha: DifferentialForm, F: Sequence[DifferentialForm]) -> CartanElement:
        """alpha (x) 1 + sum_i F(e_i) (x) xi^i."""
        dim = len(F)
        terms = {(0,) * dim: alpha}
        for i, f in enumerate(F):
            terms[_unit(dim, i)] = f
        return cls(alpha.manifold, dim, terms)

    @property
    def degree(self):
        if not self.terms:
            return None
        e, f = next(iter(self.terms.items()))
        return f.degree + 2 * sum(e)

    def part(self, xi_degree: int) -> dict:
        return {e: f for e, f in self.terms.items() if sum(e) == xi_degree}

    def coefficient(self, exps) -> DifferentialForm | None:
        return self.terms.get(tuple(exps))

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, CartanElement):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other):
        acc = dict(self.terms)
        for e, f in other.terms.items():
            acc[e] = acc[e] + f if e in acc else f
        return CartanElement(self.manifold.join(other.manifold), self.dim, acc)

    def __neg__(self):
        return CartanElement(self.manifold, self.dim, {e: -f for e, f in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return CartanElement(self.manifold, self.dim, {e: f * c for e, f in self.terms.items()})

    __rmul__ = __mul__

    def __repr__(self):
        parts = []
        for e in sorted(self.terms):
            mono = "*".join(f"xi{i + 1}" + (f"^{p}" if p > 1 else "") for i, p in enumerate(e) if p) or "1"
            parts.append(f"({self.terms[e]})*{mono}")
        return "CartanElement(" + (" + ".join(parts) or "0") + ")"


def _unit(dim: int, i: int) -> tuple:
    return tuple(int(j == i) for j in range(dim))


def _shift(e: tuple, i: int, by: int) -> tuple:
    return e[:i] + (e[i] + by,) + e[i + 1:]


def cartan_d(c: CartanElement, A: LieAction) -> CartanElement:
    """d_G = d (x) 1 - sum_i iota_{v_i} (x) xi^i."""
    acc: dict = {}

    def add(e, form):
        if form:
            acc[e] = acc[e] + form if e in acc else form

    for e, form in c.terms.items():
        add(e, exterior_d(form))
        for i, v in enumerate(A.generators):
            add(_shift(e, i, 1), -contract(v, form))
    return CartanElement(c.manifold.join(A.manifold), c.dim, acc)


def cartan_lie_derivative(c: CartanElement, A: LieAction, a: int) -> CartanElement:
    """Action of the basis element e_a: L_{v_a} on forms plus the coadjoint derivation on xi.

    The coadjoint action is e_a . xi^i = -sum_b c^i_{ab} xi^b.
    """
    acc: dict = {}

    def add(e, form):
        if form:
            acc[e] = acc[e] + form if e in acc else form

    for e, form in c.terms.items():
        add(e, lie_derivative(A.generators[a], form))
        for i, p in enumerate(e):
            if not p:
                continue
            lowered = _shift(e, i, -1)
            for b in range(c.dim):
                coeff = A.algebra.bracket(a, b).get(i)
                if coeff:
                    add(_shift(lowered, b, 1), form * (-p * coeff))
    return CartanElement(c.manifold.join(A.manifold), c.dim, acc)


def cartan_invariance_check(c: CartanElement, A: LieAction) -> Verdict:
    verdict = Verdict("cartan invariance")
    for a in range(A.dim):
        r = cartan_lie_derivative(c, A, a)
        if r:
            verdict.fail("invariance", (a,), r)
    return verdict


HAMILTONIAN = "hamiltonian"
EQUIVARIANT = "equivariance"
SELF_CONTRACTION = "self-contraction"


def _require_closed_invariant(omega: DifferentialForm, A: LieAction) -> None:
    if exterior_d(omega):
        raise PreconditionError("omega is not closed")
    inv = invariance_check(omega, A)
    if not inv.ok:
        raise PreconditionError(inv.summary(), inv.failures[0])


def _cocycle_conditions(omega, mu, A) -> Verdict:
    verdict = Verdict("cartan cocycle")
    for i, v in enumerate(A.generators):
        r = exterior_d(mu[i]) + contract(v, omega)
        if r:
            verdict.fail(HAMILTONIAN, (i,), r, "d mu(x) + iota(v_x) omega")
    for f in equivariance_check(mu, A).failures:
        verdict.fail(EQUIVARIANT, f.where, f.residual, "L_{v_x} mu(y) - mu([x,y])")
    for f in self_contraction_check(mu, A).failures:
        verdict.fail(SELF_CONTRACTION, f.where, f.residual, "iota(v_x) mu(x)")
    return verdict


def cartan_cocycle_check(omega: DifferentialForm, mu: Sequence[DifferentialForm], A: LieAction) -> Verdict:
    """Hamiltonian, equivariance and self-contraction conditions for omega - mu.

    Cross-checked against d_G-closedness and invariance computed in the Cartan model.
    """
    _require_closed_invariant(omega, A)
    if len(mu) != A.dim:
        raise ValueError(f"mu given on {len(mu)} basis elements, expected {A.dim}")
    verdict = _cocycle_conditions(omega, mu, A)
    element = CartanElement.from_pair(omega, mu)
    closed = not cartan_d(element, A)
    invariant = cartan_invariance_check(element, A).ok
    failed = verdict.failed_checks()
    if closed != (not failed & {HAMILTONIAN, SELF_CONTRACTION}) or invariant != (EQUIVARIANT not in failed):
        raise CrossCheckError(f"condition list {sorted(failed)} disagrees with d_G closed={closed}, "
                              f"invariant={invariant}")
    return verdict


def moment_from_cartan(omega: DifferentialForm, mu: Sequence[DifferentialForm], A: LieAction) -> MomentMapCandidate:
    """f_k = sign(k) * (mu~)_k for a Cartan cocycle omega - mu."""
    verdict = cartan_cocycle_check(omega, mu, A)
    if not verdict.ok:
        raise PreconditionError(verdict.summary(), verdict.failures[0])
    n = omega.degree - 1
    tilde = tilde_equivariant(list(mu), A)
    if not tilde.values:
        tilde = TotalCochain.zero(A.manifold.join(omega.manifold), A.dim, n)
    return MomentMapCandidate(n, tilde.map_slices(lambda k, form: form * bridge_sign(k)))


def cartan_equiv_check(omega0, mu0, omega1, mu1, alpha: DifferentialForm,
                       F: Sequence[DifferentialForm], A: LieAction) -> Verdict:
    """C1 - C0 = d_G(alpha + F), checked component-wise and recomputed in the model."""
    for om, mu, label in ((omega0, mu0, "first"), (omega1, mu1, "second")):
        v = cartan_cocycle_check(om, mu, A)
        if not v.ok:
            raise PreconditionError(f"{label} pair is not a Cartan cocycle: {v.summary()}")
    inv = invariance_check(alpha, A)
    if not inv.ok:
        raise PreconditionError("alpha is not invariant: " + inv.summary())
    eq = equivariance_check(F, A)
    if not eq.ok:
        raise PreconditionError("F is not equivariant: " + eq.summary())
    verdict = Verdict("cartan equivalence")
    r = omega1 - omega0 - exterior_d(alpha)
    if r:
        verdict.fail("form difference", (), r, "omega1 - omega0 - d alpha")
    for i, v in enumerate(A.generators):
        r = mu1[i] - mu0[i] - contract(v, alpha) + exterior_d(F[i])
        if r:
            verdict.fail("map difference", (i,), r, "mu1 - mu0 - iota(v_x) alpha + dF(x)")
    for f in self_contraction_check(F, A).failures:
        verdict.fail(SELF_CONTRACTION, f.where, f.residual, "iota(v_x) F(x)")
    difference = CartanElement.from_pair(omega1, mu1) - CartanElement.from_pair(omega0, mu0)
    direct = difference == cartan_d(CartanElement.from_forms_linear(alpha, F), A)
    if direct != verdict.ok:
        raise CrossCheckError(f"conditions give {verdict.summary()} but d_G comparison gives {direct}")
    return verdict


# -- isotopies ----------------------------------------------------------------------

@dataclass
class CartanFamily:
    """Generating field X_s and transported data (omega^s, mu^s), polynomial in s."""

    field: VectorField
    omega: DifferentialForm
    mu: list


@dataclass
class IsotopyResult:
    alpha: DifferentialForm
    F: list
    consistency: Verdict
    equivalence: Verdict


def field_invariance_check(X: VectorField, A: LieAction) -> Verdict:
    """[v_i, X] = 0 for all basis elements."""
    verdict = Verdict("field invariance")
    for i, v in enumerate(A.generators):
        r = lie_bracket(v, X)
        if r:
            verdict.fail("field invariance", (i,), r)
    return verdict


def family_consistency(family: CartanFamily, A: LieAction) -> Verdict:
    X, om, mu = family.field, family.omega, family.mu
    verdict = Verdict("isotopy consistency")
    r = om.partial_param("s") + lie_derivative(X, om)
    if r:
        verdict.fail("transport omega", (), r, "d/ds omega^s + L_X omega^s")
    for i, m in enumerate(mu):
        r = m.partial_param("s") + lie_derivative(X, m)
        if r:
            verdict.fail("transport mu", (i,), r, "d/ds mu^s(x) + L_X mu^s(x)")
    verdict.extend(field_invariance_check(X, A))
    return verdict


def isotopy_to_cartan_equiv(family: CartanFamily, A: LieAction) -> IsotopyResult:
    """alpha = -int iota_X omega^s ds and F = int iota_X mu^s ds, then verified."""
    consistency = family_consistency(family, A)
    if consistency.ok:
        cocycle = cartan_cocycle_check(family.omega, family.mu, A)
        consistency.extend(cocycle)
    if not consistency.ok:
        raise PreconditionError(consistency.summary(), consistency.failures[0])
    X = family.field
    alpha = -contract(X, family.omega).integrate_param("s")
    F = [contract(X, m).integrate_param("s") for m in family.mu]
    at = lambda form, s: form.substitute("s", s)
    equivalence = cartan_equiv_check(at(family.omega, 0), [at(m, 0) for m in family.mu],
                                     at(family.omega, 1), [at(m, 1) for m in family.mu],
                                     alpha, F, A)
    if not equivalence.ok:
        raise CrossCheckError("isotopy witness fails the equivalence check: " + equivalence.summary())
    return IsotopyResult(alpha, F, consistency, equivalence)
