"""Equivalences of (omega, moment map) pairs and polynomial L-infinity homotopies.

Two pairs (omega, phi) and (omega', phi') are equivalent through a witness
(eta, alpha) when omega' - omega = d alpha and phi' - phi = d_tot eta + alpha~.
With alpha = 0 this is inner equivalence, which is the same as the existence of
an L-infinity homotopy H = h0(t) + h1(t) dt with polynomial t-dependence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from .complex import (LieAction, TotalCochain, equivariance_check, invariance_check,
                      tilde_form, total_differential)
from .forms import (DifferentialForm, VectorField, contract, exterior_d, find_primitive,
                    lie_bracket, lie_derivative)
from .momentmap import (MomentMapCandidate, bridge_sign, cross_check, equivariance_of_components,
                        f_from_phi, phi_from_f, verify_linfty_direct, verify_primitive)
from .scalars import ModelManifold, ScalarFn
from .verdict import CrossCheckError, PreconditionError, Verdict

#: t values at which the homotopy conditions are additionally sampled
SAMPLE_TIMES = (Fraction(0), Fraction(1), Fraction(1, 2), Fraction(-3), Fraction(7, 3))


def bar(xi: TotalCochain) -> TotalCochain:
    """Rescale the k-slice by sign(k); an involution."""
    return xi.map_slices(lambda k, form: form * bridge_sign(k))


@dataclass
class EquivalenceWitness:
    eta: TotalCochain
    alpha: DifferentialForm

    def __neg__(self):
        return EquivalenceWitness(-self.eta, -self.alpha)

    def __add__(self, other):
        return EquivalenceWitness(self.eta + other.eta, self.alpha + other.alpha)


def _require_primitive(phi: TotalCochain, omega: DifferentialForm, A: LieAction, label: str) -> None:
    v = verify_primitive(phi, omega, A)
    if not v.ok:
        raise PreconditionError(f"{label} is not a moment map for its form: {v.summary()}", v.failures[0])


def _bracket_sum(c: TotalCochain, A: LieAction, tup: tuple, zero: DifferentialForm) -> DifferentialForm:
    """sum_{i<j} (-1)^(i+j) c([x_i, x_j], rest), i.e. the CE differential on one tuple."""
    acc = zero
    for a in range(len(tup)):
        for b in range(a + 1, len(tup)):
            rest = tup[:a] + tup[a + 1:b] + tup[b + 1:]
            sign = -1 if (a + b) % 2 else 1
            for l, coeff in A.algebra.bracket(tup[a], tup[b]).items():
                v = c.value((l,) + rest)
                if v:
                    acc = acc + v * (sign * coeff)
    return acc


def _expanded_residuals(eta: TotalCochain, alpha: DifferentialForm, delta: TotalCochain,
                        A: LieAction, n: int) -> dict:
    """Slice-wise system: d_g eta_{k-1} + (-1)^k d eta_k + (-1)^(k-1) alpha_k - delta_k."""
    out = {}
    M = A.manifold.join(eta.manifold).join(delta.manifold).join(alpha.manifold)
    for k in range(1, min(n, A.dim) + 1):
        for tup in combinations(range(A.dim), k):
            r = _bracket_sum(eta, A, tup, DifferentialForm.zero(M, n - k))
            d_eta = exterior_d(eta.value(tup))
            r = r + (d_eta if k % 2 == 0 else -d_eta)
            a_k = contract(A.fields(tup), alpha)
            r = r + (a_k if k % 2 else -a_k)
            r = r - delta.value(tup)
            if r:
                out[tup] = r
    return out


def verify_equivalence(omega: DifferentialForm, phi: TotalCochain, omega_p: DifferentialForm,
                       phi_p: TotalCochain, w: EquivalenceWitness, A: LieAction) -> Verdict:
    """omega' - omega = d alpha and phi' - phi = d_tot eta + alpha~.

    The cochain residual is reported as (d_tot eta + alpha~) - (phi' - phi).
    """
    _require_primitive(phi, omega, A, "first cochain")
    _require_primitive(phi_p, omega_p, A, "second cochain")
    inv = invariance_check(w.alpha, A)
    if not inv.ok:
        raise PreconditionError("alpha is not invariant: " + inv.summary())
    n = omega.degree - 1
    verdict = Verdict("equivalence")
    r = omega_p - omega - exterior_d(w.alpha)
    if r:
        verdict.fail("form difference", (), r, "omega' - omega - d alpha")
    delta = phi_p - phi
    produced = total_differential(w.eta, A.algebra) if w.eta.values else TotalCochain.zero(A.manifold, A.dim, n)
    if w.alpha:
        produced = produced + tilde_form(w.alpha, A)
    residual = produced - delta
    for key in sorted(residual.values, key=lambda k: (len(k), k)):
        verdict.fail("cochain difference", key, residual.values[key], f"slice {len(key)}")
    expanded = _expanded_residuals(w.eta, w.alpha, delta, A, n)
    if set(expanded) != set(residual.values) or any(expanded[k] != residual.values[k] for k in expanded):
        raise CrossCheckError("slice-wise equivalence system disagrees with the total-complex residual")
    return verdict


@dataclass
class InnerEquivalenceResult:
    verdict: Verdict
    exactness: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.verdict.ok

    def non_exact(self) -> dict:
        return {i: s.harmonic for i, s in self.exactness.items() if not s.is_exact}


def verify_inner_equivalence(omega: DifferentialForm, phi: TotalCochain, phi_p: TotalCochain,
                             eta: TotalCochain, A: LieAction) -> InnerEquivalenceResult:
    """phi' - phi = d_tot eta, plus exactness of every value of (phi' - phi)_1.

    A non-exact value of the first slice certifies that no eta at all works.
    """
    _require_primitive(phi, omega, A, "first cochain")
    _require_primitive(phi_p, omega, A, "second cochain")
    n = omega.degree - 1
    verdict = Verdict("inner equivalence")
    delta = phi_p - phi
    produced = total_differential(eta, A.algebra) if eta.values else TotalCochain.zero(A.manifold, A.dim, n)
    residual = produced - delta
    for key in sorted(residual.values, key=lambda k: (len(k), k)):
        verdict.fail("cochain difference", key, residual.values[key], f"slice {len(key)}")
    exactness = {}
    for i in range(A.dim):
        exactness[i] = find_primitive(delta.value((i,)))
    result = InnerEquivalenceResult(verdict, exactness)
    if verdict.ok and result.non_exact():
        raise CrossCheckError("inner equivalence verified but the first slice difference is not exact")
    if result.non_exact():
        verdict.certificates["not inner equivalent"] = {
            i + 1: str(h) for i, h in result.non_exact().items()}
    return result


# -- isotopies ------------------------------------------------------------------------

@dataclass
class MomentFamily:
    """Generating field X_s, omega^s and moment map components f^s, polynomial in s."""

    field: VectorField
    omega: DifferentialForm
    f: MomentMapCandidate


@dataclass
class IsotopyWitness:
    witness: EquivalenceWitness
    consistency: Verdict
    equivalence: Verdict


def isotopy_to_equivalence(family: MomentFamily, A: LieAction) -> IsotopyWitness:
    """alpha = -int iota_X omega^s ds, eta_k = (-1)^(k-1) sign(k) int iota_X f_k^s ds."""
    X, om, f = family.field, family.omega, family.f
    n = om.degree - 1
    consistency = Verdict("isotopy consistency")
    r = om.partial_param("s") + lie_derivative(X, om)
    if r:
        consistency.fail("transport omega", (), r, "d/ds omega^s + L_X omega^s")
    for key, value in sorted(f.components.values.items()):
        r = value.partial_param("s") + lie_derivative(X, value)
        if r:
            consistency.fail("transport f", key, r, "d/ds f^s + L_X f^s")
    # components absent from the table must stay zero under transport, which holds trivially
    for i, v in enumerate(A.generators):
        r = lie_bracket(v, X)
        if r:
            consistency.fail("field invariance", (i,), r)
    if consistency.ok:
        consistency.extend(verify_linfty_direct(f, om, A))
    if not consistency.ok:
        raise PreconditionError(consistency.summary(), consistency.failures[0])
    alpha = -contract(X, om).integrate_param("s")
    eta_values = {}
    for key, value in f.components.values.items():
        k = len(key)
        if k > n - 1:
            continue
        integral = contract(X, value).integrate_param("s")
        sign = bridge_sign(k) * (1 if k % 2 else -1)
        if integral:
            eta_values[key] = integral * sign
    eta = TotalCochain(A.manifold.join(f.manifold), A.dim, n - 1, eta_values)
    witness = EquivalenceWitness(eta, alpha)
    phi = phi_from_f(f)
    verdict = verify_equivalence(om.substitute("s", 0), phi.substitute("s", 0),
                                 om.substitute("s", 1), phi.substitute("s", 1), witness, A)
    if not verdict.ok:
        raise CrossCheckError("isotopy witness fails the equivalence check: " + verdict.summary())
    return IsotopyWitness(witness, consistency, verdict)


# -- the torus certificate ---------------------------------------------------------

@dataclass
class CircleCertificate:
    issued: bool
    coordinate: str | None
    contraction: object
    average_cases: int
    verdict: Verdict
    conclusion: str


CIRCLE_CONCLUSION = "no Cartan-cocycle-induced moment map is equivalent to f"


def _circle_coordinate(v: VectorField) -> int | None:
    M = v.manifold
    if len(v.components) != 1:
        return None
    (j, c), = v.components.items()
    if j >= M.torus_dim or c != 1:
        return None
    return j


def _circle_average_cases(M: ModelManifold, j: int, extra: Sequence[ScalarFn], bound: int = 2) -> int:
    """theta_average(d h / d theta_j, theta_j) = 0 on every monomial h up to ``bound``.

    Both operations act monomial by monomial, so the identity on monomials is the
    identity on all functions; the cases from ``extra`` cover the data at hand.
    """
    cases = 0
    for m in product(range(-bound, bound + 1), repeat=M.torus_dim):
        for e in product(range(bound + 1), repeat=M.affine_dim):
            zpart = ScalarFn.constant(M, 1)
            for jj, power in enumerate(e):
                zpart = zpart * ScalarFn.variable(M, f"z{jj + 1}") ** power
            h = zpart * (ScalarFn.cos(M, m) + ScalarFn.sin(M, m))
            if h.partial(j).theta_average(j):
                raise CrossCheckError(f"circle average of a derivative is nonzero for {h}")
            cases += 1
    for h in extra:
        if h.partial(j).theta_average(j):
            raise CrossCheckError(f"circle average of a derivative is nonzero for {h}")
        cases += 1
    return cases


def fixomega_certificate(omega: DifferentialForm, f: MomentMapCandidate, x: Sequence,
                         A: LieAction) -> CircleCertificate:
    """Certificate that f is inequivalent to every moment map induced by a Cartan cocycle.

    Needs a closed invariant 3-form, an equivariant moment map f, and x whose
    generator is a coordinate circle field d/dtheta_j.  Condition (i) is
    iota_{v_x} f_1(x) != 0; condition (ii) (the constant C_x vanishes for every
    eta_1) follows from the circle-average identity for theta_j-derivatives.
    """
    if omega.degree != 3:
        raise PreconditionError("the circle certificate is implemented for closed 3-forms only")
    v = A.field(x)
    j = _circle_coordinate(v)
    if j is None:
        raise PreconditionError(f"v_x = {v} is not a coordinate circle field")
    verdict = Verdict("circle certificate")
    verdict.extend(cross_check(f, omega, A))
    verdict.extend(equivariance_of_components(f, A))
    if not verdict.ok:
        raise PreconditionError("f is not an equivariant moment map: " + verdict.summary())
    f1x = DifferentialForm.zero(A.manifold, 1)
    for i, c in enumerate(x):
        if c:
            f1x = f1x + f.f(i) * Fraction(c)
    value = contract(v, f1x).as_scalar()
    coord = A.manifold.coordinates[j]
    extra = [coeff for key, form in f.components.values.items() for coeff in form.terms.values()]
    cases = _circle_average_cases(A.manifold, j, extra)
    if not value:
        verdict.fail("contraction nonzero", (), value, "iota(v_x) f_1(x) vanishes")
        return CircleCertificate(False, coord, value, cases, verdict, "")
    verdict.certificates["iota(v_x) f_1(x)"] = str(value)
    verdict.certificates["circle average identity cases"] = cases
    return CircleCertificate(True, coord, value, cases, verdict, CIRCLE_CONCLUSION)


# -- L-infinity homotopies --------------------------------------------------------

@dataclass
class HomotopyMorphism:
    """H = h0(t) + h1(t) dt; h0 has total degree n, h1 total degree n - 1."""

    n: int
    h0: TotalCochain
    h1: TotalCochain


def _times_t(c: TotalCochain) -> TotalCochain:
    T = ScalarFn.variable(c.manifold, "t")
    return c.map_forms(lambda form: form * T)


def build_homotopy_from_inner(omega: DifferentialForm, phi: TotalCochain, phi_p: TotalCochain,
                              eta: TotalCochain, A: LieAction) -> HomotopyMorphism:
    """h0(t) = bar(phi + t d_tot eta), h1(t) = bar(eta); every condition is then verified."""
    inner = verify_inner_equivalence(omega, phi, phi_p, eta, A)
    if not inner.ok:
        raise PreconditionError("not an inner equivalence: " + inner.verdict.summary())
    n = omega.degree - 1
    d_eta = total_differential(eta, A.algebra)
    h0 = bar(phi + _times_t(d_eta)) if d_eta.values else bar(phi)
    h1 = bar(eta) if eta.values else TotalCochain.zero(A.manifold, A.dim, n - 1)
    H = HomotopyMorphism(n, h0, h1)
    verdict = check_homotopy(H, omega, A, phi, phi_p)
    if not verdict.ok:
        raise CrossCheckError("constructed homotopy fails its conditions: " + verdict.summary())
    return H


MORPHISM_IN_T = "morphism in t"
DT_CONDITION = "dt condition"
RAW_HAMILTONIAN = "raw hamiltonian"
RAW_DT_LINEAR = "raw dt linear"
RAW_BRACKETS = "raw brackets"
RAW_DT_BRACKETS = "raw dt brackets"


def _morphism_failures(h0: TotalCochain, n: int, omega: DifferentialForm, A: LieAction) -> Verdict:
    return verify_linfty_direct(MomentMapCandidate(n, h0), omega, A)


def raw_system(H: HomotopyMorphism, omega: DifferentialForm, A: LieAction) -> Verdict:
    """The component equations of H, with their own loops.

    RAW_HAMILTONIAN: d h0_1(x) = -iota(v_x) omega; RAW_DT_LINEAR: d/dt h0_1 + d h1_1 = 0;
    RAW_BRACKETS and RAW_DT_BRACKETS for arities 2..n+1, with h0_{n+1} = h1_n = 0.
    """
    n = H.n
    M = A.manifold.join(H.h0.manifold).join(H.h1.manifold).join(omega.manifold)
    verdict = Verdict("raw homotopy system")
    for i in range(A.dim):
        r = exterior_d(H.h0.value((i,))) + contract(A.generators[i], omega)
        if r:
            verdict.fail(RAW_HAMILTONIAN, (i,), r)
        r = H.h0.value((i,)).partial_param("t") + exterior_d(H.h1.value((i,)))
        if r:
            verdict.fail(RAW_DT_LINEAR, (i,), r)
    for m in range(2, min(n + 1, A.dim) + 1):
        for tup in combinations(range(A.dim), m):
            # sum (-1)^(i+j+1) h_{m-1}(...) is minus the CE differential
            lhs0 = -_bracket_sum(H.h0, A, tup, DifferentialForm.zero(M, n + 1 - m))
            rhs0 = exterior_d(H.h0.value(tup)) if m <= n else DifferentialForm.zero(M, n + 1 - m)
            rhs0 = rhs0 + contract(A.fields(tup), omega) * bridge_sign(m)
            r = lhs0 - rhs0
            if r:
                verdict.fail(RAW_BRACKETS, tup, r)
            lhs1 = -_bracket_sum(H.h1, A, tup, DifferentialForm.zero(M, n - m))
            rhs1 = exterior_d(H.h1.value(tup)) if m <= n - 1 else DifferentialForm.zero(M, n - m)
            dt = H.h0.value(tup).partial_param("t") if m <= n else DifferentialForm.zero(M, n - m)
            rhs1 = rhs1 + (dt if (1 - m) % 2 == 0 else -dt)
            r = lhs1 - rhs1
            if r:
                verdict.fail(RAW_DT_BRACKETS, tup, r)
    return verdict


def dt_residual(H: HomotopyMorphism, A: LieAction) -> TotalCochain:
    """d_tot bar(h1) - d/dt bar(h0)."""
    lhs = total_differential(bar(H.h1), A.algebra) if H.h1.values else \
        TotalCochain.zero(H.h0.manifold, A.dim, H.n)
    return lhs - bar(H.h0).partial_param("t")


def check_homotopy(H: HomotopyMorphism, omega: DifferentialForm, A: LieAction,
                   phi: TotalCochain | None = None, phi_p: TotalCochain | None = None) -> Verdict:
    """Boundary values, the morphism condition on h0 (symbolically in t and at sample t),
    the dt-condition d_tot bar(h1) = d/dt bar(h0), and the raw component system.
    """
    verdict = Verdict("homotopy")
    if phi is not None:
        r = H.h0.substitute("t", 0) - bar(phi)
        for key, v in r.values.items():
            verdict.fail("boundary t=0", key, v)
    if phi_p is not None:
        r = H.h0.substitute("t", 1) - bar(phi_p)
        for key, v in r.values.items():
            verdict.fail("boundary t=1", key, v)
    morphism = _morphism_failures(H.h0, H.n, omega, A)
    for f in morphism.failures:
        verdict.fail(MORPHISM_IN_T, f.where, f.residual, f.check)
    for t in SAMPLE_TIMES:
        sample = _morphism_failures(H.h0.substitute("t", t), H.n, omega, A)
        for f in sample.failures:
            verdict.fail(MORPHISM_IN_T, f.where, f.residual, f"{f.check} at t={t}")
    dt = dt_residual(H, A)
    for key, v in sorted(dt.values.items()):
        verdict.fail(DT_CONDITION, key, v)
    raw = raw_system(H, omega, A)
    raw_checks = raw.failed_checks()
    if (not morphism.failures) != (not raw_checks & {RAW_HAMILTONIAN, RAW_BRACKETS}):
        raise CrossCheckError("morphism condition disagrees with the raw morphism equations")
    if (not dt.values) != (not raw_checks & {RAW_DT_LINEAR, RAW_DT_BRACKETS}):
        raise CrossCheckError("dt-condition disagrees with the raw dt-equations")
    verdict.extend(raw)
    return verdict


def extract_eta_from_homotopy(H: HomotopyMorphism, omega: DifferentialForm, A: LieAction) -> TotalCochain:
    """eta = int_0^1 bar(h1(t)) dt; then phi' - phi = d_tot eta."""
    verdict = check_homotopy(H, omega, A)
    if not verdict.ok:
        raise PreconditionError("not an L-infinity homotopy: " + verdict.summary(), verdict.failures[0])
    eta = bar(H.h1).integrate_param("t")
    start = bar(H.h0.substitute("t", 0))
    end = bar(H.h0.substitute("t", 1))
    produced = total_differential(eta, A.algebra) if eta.values else TotalCochain.zero(A.manifold, A.dim, H.n)
    if produced != end - start:
        raise CrossCheckError("extracted eta does not reproduce the endpoint difference")
    return eta
