import pytest
from hypothesis import given

import gen
from momap.complex import TotalCochain, total_differential
from momap.equivalence import (CIRCLE_CONCLUSION, DT_CONDITION, RAW_DT_BRACKETS, RAW_DT_LINEAR,
                               EquivalenceWitness, HomotopyMorphism, MomentFamily, build_homotopy_from_inner,
                               check_homotopy, dt_residual, extract_eta_from_homotopy, fixomega_certificate,
                               isotopy_to_equivalence, raw_system, verify_equivalence,
                               verify_inner_equivalence)
from momap.forms import DifferentialForm
from momap.momentmap import MomentMapCandidate, phi_from_f
from momap.parser import parse_form
from momap.scalars import ScalarFn
from momap.scenario import load
from momap.verdict import PreconditionError

INNER = load("torus_inner")
NOT_INNER = load("torus_not_inner")
OMEGA = INNER.forms["omega"]
A = INNER.action
M = INNER.manifold


def phis(sc):
    return phi_from_f(sc.moment_map("f")), phi_from_f(sc.moment_map("f_prime"))


def zero_witness(n=2):
    return EquivalenceWitness(TotalCochain.zero(M, 2, n - 1), DifferentialForm.zero(M, n))


def test_sine_inner_equivalence():
    phi, phi_p = phis(INNER)
    r = verify_inner_equivalence(OMEGA, phi, phi_p, INNER.maps["eta"], A)
    assert r.ok and not r.non_exact()


def test_not_inner_equivalent_certificate():
    phi, phi_p = phis(NOT_INNER)
    r = verify_inner_equivalence(OMEGA, phi, phi_p, TotalCochain.zero(M, 2, 1), A)
    assert not r.ok
    harmonic = r.non_exact()
    assert harmonic == {0: parse_form("-dtheta1", M), 1: parse_form("-dtheta2", M)}
    assert "not inner equivalent" in r.verdict.certificates


def test_inner_and_full_checks_agree():
    for sc in (INNER, NOT_INNER):
        phi, phi_p = phis(sc)
        eta = sc.maps["eta"]
        inner = verify_inner_equivalence(OMEGA, phi, phi_p, eta, A)
        full = verify_equivalence(OMEGA, phi, OMEGA, phi_p, EquivalenceWitness(eta, DifferentialForm.zero(M, 2)), A)
        assert inner.ok == full.ok
        assert {f.where for f in inner.verdict.failures} == {f.where for f in full.failures}


def test_equivalence_relation_properties():
    phi, phi_p = phis(INNER)
    w = EquivalenceWitness(INNER.maps["eta"], DifferentialForm.zero(M, 2))
    assert verify_equivalence(OMEGA, phi, OMEGA, phi, zero_witness(), A).ok
    assert verify_equivalence(OMEGA, phi, OMEGA, phi_p, w, A).ok
    assert verify_equivalence(OMEGA, phi_p, OMEGA, phi, -w, A).ok
    # transitivity through a second step: shift z by 3 via alpha = -3 dtheta1^dtheta2
    third = phi_p + TotalCochain(M, 2, 2, {(0,): parse_form("-3*dtheta2", M), (1,): parse_form("3*dtheta1", M),
                                           (0, 1): parse_form("3", M)})
    w2 = EquivalenceWitness(TotalCochain.zero(M, 2, 1), parse_form("-3*dtheta1^dtheta2", M))
    assert verify_equivalence(OMEGA, phi_p, OMEGA, third, w2, A).ok
    assert verify_equivalence(OMEGA, phi, OMEGA, third, w + w2, A).ok


def test_homotopy_round_trip():
    phi, phi_p = phis(INNER)
    eta = INNER.maps["eta"]
    H = build_homotopy_from_inner(OMEGA, phi, phi_p, eta, A)
    assert check_homotopy(H, OMEGA, A, phi, phi_p).ok
    assert not raw_system(H, OMEGA, A).failures
    extracted = extract_eta_from_homotopy(H, OMEGA, A)
    assert total_differential(extracted, A.algebra) == total_differential(eta, A.algebra)


def test_broken_homotopy_is_caught_by_both_routes():
    phi, phi_p = phis(INNER)
    H = build_homotopy_from_inner(OMEGA, phi, phi_p, INNER.maps["eta"], A)
    bad = HomotopyMorphism(2, H.h0, H.h1 * 2)
    v = check_homotopy(bad, OMEGA, A)
    assert DT_CONDITION in v.failed_checks() and RAW_DT_LINEAR in v.failed_checks()
    with pytest.raises(PreconditionError):
        extract_eta_from_homotopy(bad, OMEGA, A)


HOMOTOPY_CORPUS = [s for s in gen.corpus("f") if s.n >= 2]


@given(gen.rngs)
def test_dt_condition_matches_raw_system(rng):
    sc = rng.choice(HOMOTOPY_CORPUS)
    phi = phi_from_f(sc.moment_map())
    eta = gen.cochain(rng, sc.manifold, sc.dim, sc.n - 1, max_freq=1, max_poly=2)
    phi_p = phi + total_differential(eta, sc.algebra)
    H = build_homotopy_from_inner(sc.forms["omega"], phi, phi_p, eta, sc.action)
    if rng.random() < 0.7:
        T = ScalarFn.variable(sc.manifold, "t")
        noise = gen.cochain(rng, sc.manifold, sc.dim, sc.n - 1 + rng.randint(0, 1), max_freq=1, max_poly=1)
        noise = noise.map_forms(lambda f: f * T ** rng.randint(0, 2))
        if noise.total_degree == sc.n:
            H = HomotopyMorphism(sc.n, H.h0 + noise, H.h1)
        else:
            H = HomotopyMorphism(sc.n, H.h0, H.h1 + noise)
    v = check_homotopy(H, sc.forms["omega"], sc.action)  # raises if the routes disagree
    raw = raw_system(H, sc.forms["omega"], sc.action).failed_checks()
    assert (not dt_residual(H, sc.action)) == (not raw & {RAW_DT_LINEAR, RAW_DT_BRACKETS})
    assert v.ok == (not v.failures)


def test_fixomega_certificate():
    sc = load("torus")
    cert = fixomega_certificate(sc.forms["omega"], sc.moment_map(), sc.fixomega_x, sc.action)
    assert cert.issued and cert.contraction == ScalarFn.constant(M, 1)
    assert cert.conclusion == CIRCLE_CONCLUSION
    cart = load("torus_cartan")
    cert = fixomega_certificate(cart.forms["omega"], cart.moment_map(), cart.fixomega_x, cart.action)
    assert not cert.issued


def test_fixomega_preconditions():
    sc = load("aff1_r3")
    with pytest.raises(PreconditionError):
        fixomega_certificate(sc.forms["omega"], sc.moment_map(), (1, 0), sc.action)


@pytest.mark.parametrize("name", ["torus_shift", "torus_rotate"])
def test_isotopy_witnesses(name):
    sc = load(name)
    fam = sc.family
    f = MomentMapCandidate(sc.n, fam["f_s"])
    w = isotopy_to_equivalence(MomentFamily(fam["X_s"], fam["omega_s"], f), sc.action)
    phi = phi_from_f(f)
    assert verify_equivalence(fam["omega_s"].substitute("s", 0), phi.substitute("s", 0),
                              fam["omega_s"].substitute("s", 1), phi.substitute("s", 1), w.witness, sc.action).ok


def test_isotopy_rejects_inconsistent_family():
    sc = load("torus_shift")
    fam = sc.family
    f = MomentMapCandidate(sc.n, fam["f_s"])
    with pytest.raises(PreconditionError):
        isotopy_to_equivalence(MomentFamily(fam["X_s"] * 2, fam["omega_s"], f), sc.action)
