from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given

import gen
from momap.complex import TotalCochain, total_differential, tilde_form
from momap.forms import DifferentialForm
from momap.lie import ce_is_coboundary
from momap.momentmap import (GUARANTEED, INCONCLUSIVE, NO_MOMENT_MAP, HamiltonianPair, MomentMapCandidate,
                             bridge_sign, cross_check, equivariance_of_components, existence_hypotheses,
                             f_from_phi, is_hamiltonian, monomial_ansatz, obstruction_class, phi_from_f,
                             solve_primitive, verify_linfty_direct, verify_primitive)
from momap.parser import parse_form, parse_scalar, parse_vector_field
from momap.scalars import Point
from momap.scenario import load
from momap.verdict import CrossCheckError

TORUS = load("torus")


def test_sign_table():
    assert [bridge_sign(k) for k in range(1, 6)] == [1, 1, -1, -1, 1]
    for k in range(2, 13):
        assert bridge_sign(k - 1) * bridge_sign(k) == (-1) ** k


def test_torus_example_passes_both_routes():
    f = TORUS.moment_map()
    A, omega = TORUS.action, TORUS.forms["omega"]
    assert verify_primitive(phi_from_f(f), omega, A).ok
    assert verify_linfty_direct(f, omega, A).ok
    assert cross_check(f, omega, A).ok
    assert equivariance_of_components(f, A).ok
    assert f_from_phi(phi_from_f(f)) == f


def test_zero_candidate_residual_is_minus_tilde_omega():
    A, omega = TORUS.action, TORUS.forms["omega"]
    zero = TotalCochain.zero(A.manifold, 2, 2)
    v = verify_primitive(zero, omega, A)
    residual = {f.where: f.residual for f in v.failures}
    assert residual == {k: -val for k, val in tilde_form(omega, A).values.items()}
    direct = verify_linfty_direct(MomentMapCandidate(2, zero), omega, A)
    assert direct.failed_checks() == {"moment", "morphism"}


def test_non_closed_perturbation_is_localized_in_slice_one():
    A, omega = TORUS.action, TORUS.forms["omega"]
    phi = phi_from_f(TORUS.moment_map())
    bad = phi + TotalCochain(A.manifold, 2, 2, {(1,): parse_form("z1^2*dtheta1", A.manifold)})
    v = verify_primitive(bad, omega, A)
    assert {f.where for f in v.failures} == {(1,)}


def test_zero_form_with_zero_map():
    sc = load("zero")
    assert cross_check(sc.moment_map(), sc.forms["omega"], sc.action).ok


def test_solve_examples():
    A, omega = TORUS.action, TORUS.forms["omega"]
    r = solve_primitive(omega, A, monomial_ansatz(A.manifold, 2, 2, 1))
    assert r.found and verify_primitive(r.phi, omega, A).ok
    zero = DifferentialForm.zero(A.manifold, 3)
    assert solve_primitive(zero, A, monomial_ansatz(A.manifold, 2, 2, 1)).found
    tr = load("translations_r2")
    assert not solve_primitive(tr.forms["omega"], tr.action, monomial_ansatz(tr.manifold, 2, 1, 3)).found


def test_obstruction_examples():
    A, omega = TORUS.action, TORUS.forms["omega"]
    r = obstruction_class(omega, A, TORUS.base_point())
    assert r.vanishes and not r.cochain
    tr = load("translations_r2")
    r = obstruction_class(tr.forms["omega"], tr.action, Point((), (3, -1)))
    assert not r.vanishes and r.cochain.values == {(0, 1): 1}
    sc = load("aff1_r3")
    r = obstruction_class(sc.forms["omega"], sc.action, sc.base_point())
    assert r.vanishes


def test_existence_report():
    tr = load("translations_r2")
    assert existence_hypotheses(tr.forms["omega"], tr.action, tr.base_point()).conclusion == NO_MOMENT_MAP
    assert existence_hypotheses(TORUS.forms["omega"], TORUS.action, TORUS.base_point()).conclusion == INCONCLUSIVE
    sc = load("aff1_r3")
    assert existence_hypotheses(sc.forms["omega"], sc.action, sc.base_point()).conclusion == GUARANTEED


@pytest.mark.parametrize("name", ["aff1_r2", "translations_r2", "torus", "aff1_r3"])
def test_obstruction_class_independent_of_point(name):
    sc = load(name)
    M = sc.manifold
    classes = []
    for theta in product([Fraction(q, 2) for q in range(4)], repeat=M.torus_dim):
        for z in product([-1, 0, 2], repeat=M.affine_dim):
            classes.append(obstruction_class(sc.forms["omega"], sc.action, Point(theta, z)).cochain)
    for c in classes[1:]:
        assert ce_is_coboundary(c - classes[0], sc.algebra).is_coboundary


def test_hamiltonian_pairs():
    M = TORUS.manifold
    omega = TORUS.forms["omega"]
    pair = HamiltonianPair(parse_form("z1*dtheta2", M), parse_vector_field("par_theta1", M))
    assert is_hamiltonian(pair, omega)
    assert not is_hamiltonian(HamiltonianPair(parse_form("z1*dtheta2", M), parse_vector_field("par_theta2", M)),
                              omega)


CORPUS = gen.corpus("f")


@given(gen.rngs)
def test_routes_agree_on_valid_and_perturbed_candidates(rng):
    sc = rng.choice(CORPUS)
    f = sc.moment_map()
    if sc.n >= 2 and rng.random() < 0.5:
        # stay valid: add d_tot of a random cochain, rescaled to components
        eta = gen.cochain(rng, sc.manifold, sc.dim, sc.n - 1, max_freq=1, max_poly=2)
        f = f_from_phi(phi_from_f(f) + total_differential(eta, sc.algebra), sc.n)
    family = rng.choice(["none", "moment", "morphism", "top"])
    candidate = f if family == "none" else gen.perturb(rng, f, family)
    if candidate is None:
        candidate = f
    omega = sc.forms["omega"]
    a = verify_primitive(phi_from_f(candidate), omega, sc.action)
    b = verify_linfty_direct(candidate, omega, sc.action)
    assert a.ok == b.ok
    assert {x.where for x in a.failures} == {x.where for x in b.failures}
    if candidate is f:
        assert b.ok
    cross_check(candidate, omega, sc.action)


@given(gen.rngs)
def test_primitives_form_an_affine_space(rng):
    sc = rng.choice([s for s in CORPUS if s.n >= 2])
    phi = phi_from_f(sc.moment_map())
    kappa = total_differential(gen.cochain(rng, sc.manifold, sc.dim, sc.n - 1, max_freq=1), sc.algebra)
    omega = sc.forms["omega"]
    assert verify_primitive(phi + kappa, omega, sc.action).ok
    assert not total_differential((phi + kappa) - phi, sc.algebra)


def test_cross_check_raises_on_disagreement(monkeypatch):
    import momap.momentmap as mm
    f = TORUS.moment_map()
    broken = mm.Verdict("linfty")
    broken.fail("moment", (0,), None)
    monkeypatch.setattr(mm, "verify_linfty_direct", lambda *a: broken)
    with pytest.raises(CrossCheckError):
        mm.cross_check(f, TORUS.forms["omega"], TORUS.action)
