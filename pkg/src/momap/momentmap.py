"""Homotopy moment maps: sign bridge, two verification routes, solving and obstructions.

A candidate f has components f_k : Lambda^k g -> Omega^(n-k)(M), k = 1..n.  It
corresponds to the cochain phi with phi_k = sign(k) f_k, and f is a moment map
exactly when d_tot phi equals the tilde image of omega.  Both formulations are
checked independently here and compared by :func:`cross_check`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb
from typing import Sequence

from . import linalg
from .complex import (LieAction, TotalCochain, invariance_check, tilde_form,
                      total_differential)
from .forms import DifferentialForm, VectorField, contract, exterior_d, lie_derivative
from .lie import CEScalarCochain, ce_cohomology_dims, ce_differential, ce_is_coboundary
from .scalars import ModelManifold, Point, ScalarFn, _canon_freq
from .verdict import CrossCheckError, PreconditionError, Verdict


def bridge_sign(k: int) -> int:
    """-(-1)^(k(k+1)/2): 1, 1, -1, -1, 1, ... for k = 1, 2, 3, ..."""
    return -1 if (k * (k + 1) // 2) % 2 == 0 else 1


class MomentMapCandidate:
    """Components f_1..f_n stored as one cochain of total degree n."""

    __slots__ = ("n", "components")

    def __init__(self, n: int, components: TotalCochain):
        if components.values and components.total_degree != n:
            raise ValueError(f"components have total degree {components.total_degree}, expected {n}")
        self.n = n
        self.components = components

    @classmethod
    def from_values(cls, n: int, manifold: ModelManifold, dim: int, values) -> MomentMapCandidate:
        return cls(n, TotalCochain(manifold, dim, n, values))

    @property
    def dim(self) -> int:
        return self.components.dim

    @property
    def manifold(self) -> ModelManifold:
        return self.components.manifold

    def f(self, *indices) -> DifferentialForm:
        return self.components.value(indices)

    def __eq__(self, other):
        if not isinstance(other, MomentMapCandidate):
            return NotImplemented
        return self.n == other.n and self.components == other.components

    def __repr__(self):
        return f"MomentMapCandidate(n={self.n}, {self.components!r})"


def _rescale(c: TotalCochain) -> TotalCochain:
    return c.map_slices(lambda k, form: form * bridge_sign(k))


def phi_from_f(f: MomentMapCandidate) -> TotalCochain:
    return _rescale(f.components)


def f_from_phi(phi: TotalCochain, n: int | None = None) -> MomentMapCandidate:
    return MomentMapCandidate(phi.total_degree if n is None else n, _rescale(phi))


def _require_closed_invariant(omega: DifferentialForm, A: LieAction) -> None:
    if exterior_d(omega):
        raise PreconditionError("omega is not closed")
    inv = invariance_check(omega, A)
    if not inv.ok:
        raise PreconditionError(inv.summary(), inv.failures[0])


def verify_primitive(phi: TotalCochain, omega: DifferentialForm, A: LieAction) -> Verdict:
    """d_tot phi = omega~, with the residual localized on basis tuples."""
    _require_closed_invariant(omega, A)
    verdict = Verdict("primitive")
    residual = total_differential(phi, A.algebra) - tilde_form(omega, A)
    for key in sorted(residual.values, key=lambda k: (len(k), k)):
        verdict.fail("primitive", key, residual.values[key], f"slice {len(key)}")
    return verdict


def _bracket_term(f: MomentMapCandidate, A: LieAction, tup: tuple, zero: DifferentialForm):
    """sum_{i<j} (-1)^(i+j+1) f_{k-1}([x_i, x_j], x_1..^i..^j..x_k)."""
    acc = zero
    k = len(tup)
    for a in range(k):
        for b in range(a + 1, k):
            rest = tup[:a] + tup[a + 1:b] + tup[b + 1:]
            sign = 1 if (a + b) % 2 else -1
            for l, c in A.algebra.bracket(tup[a], tup[b]).items():
                v = f.f(l, *rest)
                if v:
                    acc = acc + v * (sign * c)
    return acc


def verify_linfty_direct(f: MomentMapCandidate, omega: DifferentialForm, A: LieAction) -> Verdict:
    """The moment condition and the L-infinity morphism equations, tuple by tuple.

    Checks: "moment" d f_1(x) = -iota(v_x) omega; "morphism" for 2 <= k <= n;
    "top" for k = n + 1 (vacuous when dim g < n + 1).
    """
    _require_closed_invariant(omega, A)
    n = f.n
    if omega.degree != n + 1:
        raise PreconditionError(f"omega has degree {omega.degree}, expected {n + 1}")
    verdict = Verdict("linfty")
    M = A.manifold.join(omega.manifold).join(f.manifold)
    for i in range(A.dim):
        r = exterior_d(f.f(i)) + contract(A.generators[i], omega)
        if r:
            verdict.fail("moment", (i,), r)
    for k in range(2, min(n + 1, A.dim) + 1):
        for tup in combinations(range(A.dim), k):
            top_form = contract(A.fields(tup), omega) * bridge_sign(k)
            lhs = _bracket_term(f, A, tup, DifferentialForm.zero(M, n + 1 - k))
            if k <= n:
                r = lhs - exterior_d(f.f(*tup)) - top_form
                if r:
                    verdict.fail("morphism", tup, r)
            else:
                r = lhs - top_form
                if r:
                    verdict.fail("top", tup, r)
    return verdict


def cross_check(f: MomentMapCandidate, omega: DifferentialForm, A: LieAction) -> Verdict:
    """Run both routes; they must agree on the verdict and on every failing tuple."""
    coboundary = verify_primitive(phi_from_f(f), omega, A)
    direct = verify_linfty_direct(f, omega, A)
    where_a = {x.where for x in coboundary.failures}
    where_b = {x.where for x in direct.failures}
    if coboundary.ok != direct.ok or where_a != where_b:
        raise CrossCheckError(f"routes disagree: {coboundary.summary()} vs {direct.summary()}")
    merged = Verdict("moment map")
    merged.extend(direct)
    return merged


def equivariance_of_components(f: MomentMapCandidate, A: LieAction) -> Verdict:
    """L_{v_x} f_k(y_1..y_k) = sum_i f_k(y_1, .., [x, y_i], .., y_k) on basis elements."""
    verdict = Verdict("moment map equivariance")
    for k in range(1, min(f.n, A.dim) + 1):
        for tup in combinations(range(A.dim), k):
            value = f.f(*tup)
            for x in range(A.dim):
                lhs = lie_derivative(A.generators[x], value)
                rhs = DifferentialForm.zero(f.manifold, f.n - k)
                for pos, y in enumerate(tup):
                    for l, c in A.algebra.bracket(x, y).items():
                        args = tup[:pos] + (l,) + tup[pos + 1:]
                        rhs = rhs + f.f(*args) * c
                r = lhs - rhs
                if r:
                    verdict.fail("equivariance", (x,) + tup, r)
    return verdict


# -- solving in a finite ansatz -----------------------------------------------------

@dataclass(frozen=True)
class SolveResult:
    phi: TotalCochain | None
    coefficients: tuple | None
    ansatz_size: int

    @property
    def found(self) -> bool:
        return self.phi is not None


def _coordinates(c: TotalCochain) -> dict:
    """Flatten a cochain to {(tuple, form index, exponent key, part): rational}."""
    out = {}
    for key, form in c.values.items():
        for idx, coeff in form.terms.items():
            for mono, (re_, im_) in coeff.terms.items():
                if re_:
                    out[(key, idx, mono, 0)] = re_
                if im_:
                    out[(key, idx, mono, 1)] = im_
    return out


def solve_primitive(omega: DifferentialForm, A: LieAction, ansatz: Sequence[TotalCochain]) -> SolveResult:
    """Exact linear solve of d_tot phi = omega~ with phi in the span of ``ansatz``.

    A miss only means no primitive lies in that span.
    """
    _require_closed_invariant(omega, A)
    n = omega.degree - 1
    target = _coordinates(tilde_form(omega, A))
    images = []
    for b in ansatz:
        if b.values and b.total_degree != n:
            raise ValueError(f"ansatz element of total degree {b.total_degree}, expected {n}")
        images.append(_coordinates(total_differential(b, A.algebra)))
    rows = sorted(set(target).union(*images), key=repr)
    if not ansatz:
        found = not target
        zero = TotalCochain.zero(A.manifold, A.dim, n)
        return SolveResult(zero if found else None, () if found else None, 0)
    matrix = [[img.get(r, Fraction(0)) for img in images] for r in rows]
    rhs = [target.get(r, Fraction(0)) for r in rows]
    x = linalg.solve(matrix, rhs, ncols=len(ansatz))
    if x is None:
        return SolveResult(None, None, len(ansatz))
    phi = TotalCochain.zero(A.manifold, A.dim, n)
    for c, b in zip(x, ansatz):
        if c:
            phi = phi + b * c
    return SolveResult(phi, tuple(x), len(ansatz))


def _trig_basis(M: ModelManifold, max_frequency: int) -> list:
    fns = [ScalarFn.constant(M, 1)]
    if M.torus_dim and max_frequency > 0:
        seen = set()
        for m in product(range(-max_frequency, max_frequency + 1), repeat=M.torus_dim):
            if not any(m):
                continue
            u = _canon_freq(m)
            if u in seen:
                continue
            seen.add(u)
            fns.append(ScalarFn.cos(M, u))
            fns.append(ScalarFn.sin(M, u))
    return fns


def _z_monomials(M: ModelManifold, degree: int) -> list:
    out = []
    for exps in product(range(degree + 1), repeat=M.affine_dim):
        if sum(exps) > degree:
            continue
        f = ScalarFn.constant(M, 1)
        for j, e in enumerate(exps):
            if e:
                f = f * ScalarFn.variable(M, f"z{j + 1}") ** e
        out.append(f)
    return out


def monomial_ansatz(manifold: ModelManifold, dim: int, n: int, poly_degree: int,
                    max_frequency: int = 0) -> list:
    """Cochains of total degree n with one coordinate monomial coefficient each."""
    scalars = [z * trig for z in _z_monomials(manifold, poly_degree)
               for trig in _trig_basis(manifold, max_frequency)]
    basis = []
    for k in range(1, min(n, dim) + 1):
        for tup in combinations(range(dim), k):
            for idx in combinations(range(manifold.dim), n - k):
                for s in scalars:
                    form = DifferentialForm(manifold, n - k, {idx: s})
                    basis.append(TotalCochain(manifold, dim, n, {tup: form}))
    return basis


# -- obstruction theory ------------------------------------------------------------

def restrict_at_point(c: TotalCochain, p: Point) -> dict:
    """Chain map to Lambda g^*: keep function-valued entries and evaluate them at p.

    Returns {k: CEScalarCochain} for the slices carrying 0-forms.
    """
    out = {}
    for key, form in c.values.items():
        if form.degree == 0:
            out.setdefault(len(key), {})[key] = form.as_scalar().eval_at(p)
    return {k: CEScalarCochain(c.dim, k, vals) for k, vals in out.items()}


@dataclass
class ObstructionResult:
    cochain: CEScalarCochain
    vanishes: bool
    primitive: CEScalarCochain | None
    certificate: object | None


def obstruction_class(omega: DifferentialForm, A: LieAction, p: Point) -> ObstructionResult:
    """The CE class of omega_{n+1} evaluated at p; a nonzero class forbids moment maps."""
    _require_closed_invariant(omega, A)
    n = omega.degree - 1
    k = n + 1
    values = {}
    if k <= A.dim:
        for tup in combinations(range(A.dim), k):
            v = contract(A.fields(tup), omega).as_scalar().eval_at(p)
            if v:
                values[tup] = v
    cochain = CEScalarCochain(A.dim, k, values)
    # the restriction map sends omega~ to (-1)^n omega_{n+1}|_p
    via_chain_map = restrict_at_point(tilde_form(omega, A), p).get(k, CEScalarCochain(A.dim, k))
    if via_chain_map != cochain * (-1) ** n:
        raise CrossCheckError("restriction of omega~ disagrees with the direct evaluation")
    if ce_differential(cochain, A.algebra):
        raise CrossCheckError("restricted top contraction is not a CE cocycle")
    search = ce_is_coboundary(cochain, A.algebra)
    return ObstructionResult(cochain, search.is_coboundary, search.primitive, search.certificate)


def de_rham_betti(manifold: ModelManifold) -> list:
    """Betti numbers of T^a x R^b."""
    a = manifold.torus_dim
    return [comb(a, j) for j in range(manifold.dim + 1)]


@dataclass
class ExistenceReport:
    ce_betti: list
    de_rham_betti: list
    products: dict
    obstruction: ObstructionResult
    conclusion: str


NO_MOMENT_MAP = "no moment map exists"
GUARANTEED = "existence guaranteed"
INCONCLUSIVE = "inconclusive"


def existence_hypotheses(omega: DifferentialForm, A: LieAction, p: Point) -> ExistenceReport:
    """Kunneth-type sufficient condition together with the obstruction class."""
    n = omega.degree - 1
    ce = ce_cohomology_dims(A.algebra)
    dr = de_rham_betti(A.manifold)
    products = {}
    for j in range(1, n + 1):
        cj = ce[j] if j < len(ce) else 0
        mj = dr[n + 1 - j] if n + 1 - j < len(dr) else 0
        products[j] = cj * mj
    obstruction = obstruction_class(omega, A, p)
    if not obstruction.vanishes:
        conclusion = NO_MOMENT_MAP
    elif not any(products.values()):
        conclusion = GUARANTEED
    else:
        conclusion = INCONCLUSIVE
    return ExistenceReport(ce, dr, products, obstruction, conclusion)


# -- Hamiltonian forms ---------------------------------------------------------------

@dataclass(frozen=True)
class HamiltonianPair:
    form: DifferentialForm
    field: VectorField


def hamiltonian_residual(pair: HamiltonianPair, omega: DifferentialForm) -> DifferentialForm:
    """d(form) + iota(field) omega; zero exactly for a Hamiltonian pair."""
    return exterior_d(pair.form) + contract(pair.field, omega)


def is_hamiltonian(pair: HamiltonianPair, omega: DifferentialForm) -> bool:
    return not hamiltonian_residual(pair, omega)
