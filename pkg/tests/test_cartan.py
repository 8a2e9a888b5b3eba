import pytest
from hypothesis import given

import gen
from momap.cartan import (SELF_CONTRACTION, CartanElement, CartanFamily, cartan_cocycle_check, cartan_d,
                          cartan_equiv_check, cartan_invariance_check, isotopy_to_cartan_equiv,
                          moment_from_cartan)
from momap.forms import DifferentialForm
from momap.momentmap import cross_check, verify_linfty_direct, verify_primitive, phi_from_f
from momap.parser import parse_form
from momap.scenario import load
from momap.verdict import PreconditionError

TORUS = load("torus")
CARTAN = load("torus_cartan")


def test_cartan_cocycle_on_torus():
    omega, A = CARTAN.forms["omega"], CARTAN.action
    assert cartan_cocycle_check(omega, CARTAN.maps["mu"], A).ok
    assert not cartan_d(CartanElement.from_pair(omega, CARTAN.maps["mu"]), A)


def test_first_components_fail_only_self_contraction():
    v = cartan_cocycle_check(TORUS.forms["omega"], TORUS.maps["mu"], TORUS.action)
    assert v.failed_checks() == {SELF_CONTRACTION}
    assert {f.where for f in v.failures} == {(0,), (1,), (0, 1)}


def test_moment_from_cartan_on_torus():
    f = moment_from_cartan(CARTAN.forms["omega"], CARTAN.maps["mu"], CARTAN.action)
    M = CARTAN.manifold
    assert f.f(0, 1) == parse_form("-z1", M)
    assert cross_check(f, CARTAN.forms["omega"], CARTAN.action).ok
    with pytest.raises(PreconditionError):
        moment_from_cartan(TORUS.forms["omega"], TORUS.maps["mu"], TORUS.action)


@pytest.mark.parametrize("sc", gen.corpus("mu"), ids=lambda s: s.id)
def test_cocycle_conditions_agree_with_cartan_differential(sc):
    omega, mu, A = sc.forms["omega"], sc.maps["mu"], sc.action
    verdict = cartan_cocycle_check(omega, mu, A)
    element = CartanElement.from_pair(omega, mu)
    assert verdict.ok == (not cartan_d(element, A) and cartan_invariance_check(element, A).ok)
    if verdict.ok:
        f = moment_from_cartan(omega, mu, A)
        assert verify_primitive(phi_from_f(f), omega, A).ok and verify_linfty_direct(f, omega, A).ok


@pytest.mark.parametrize("sc", gen.corpus("mu"), ids=lambda s: s.id)
def test_cartan_d_squared_on_corpus(sc):
    element = CartanElement.from_pair(sc.forms["omega"], sc.maps["mu"])
    if cartan_invariance_check(element, sc.action).ok:
        assert not cartan_d(cartan_d(element, sc.action), sc.action)


@given(gen.rngs)
def test_cartan_d_squared_on_random_invariant_elements(rng):
    name = rng.choice(["torus", "aff1", "circle"])
    A = gen.ACTIONS[name]()
    degree = rng.randint(2, 3)
    inv = gen.invariant_basis(A, degree)
    eq = gen.equivariant_basis(A, degree - 2, poly=1)
    alpha = gen.combination(rng, inv, DifferentialForm.zero(A.manifold, degree))
    F = gen.combination(rng, eq, [DifferentialForm.zero(A.manifold, degree - 2)] * A.dim) if eq else \
        [DifferentialForm.zero(A.manifold, degree - 2)] * A.dim
    element = CartanElement.from_forms_linear(alpha, F)
    assert cartan_invariance_check(element, A).ok
    assert not cartan_d(cartan_d(element, A), A)


@pytest.mark.parametrize("name", ["torus_shift", "torus_rotate"])
def test_isotopy_outputs_pass_equivalence(name):
    sc = load(name)
    fam = sc.family
    r = isotopy_to_cartan_equiv(CartanFamily(fam["X_s"], fam["omega_s"], fam["mu_s"]), sc.action)
    at = lambda form, s: form.substitute("s", s)
    v = cartan_equiv_check(at(fam["omega_s"], 0), [at(m, 0) for m in fam["mu_s"]],
                           at(fam["omega_s"], 1), [at(m, 1) for m in fam["mu_s"]], r.alpha, r.F, sc.action)
    assert v.ok


def test_shift_witness_values():
    sc = load("torus_shift")
    fam = sc.family
    r = isotopy_to_cartan_equiv(CartanFamily(fam["X_s"], fam["omega_s"], fam["mu_s"]), sc.action)
    assert r.alpha == parse_form("-3*dtheta1^dtheta2", sc.manifold)
    assert not any(r.F)


def test_equivalence_check_rejects_wrong_witness():
    omega, mu, A = CARTAN.forms["omega"], CARTAN.maps["mu"], CARTAN.action
    M = A.manifold
    shifted = [parse_form("(z1 - 3)*dtheta2", M), parse_form("-(z1 - 3)*dtheta1", M)]
    good = cartan_equiv_check(omega, mu, omega, shifted, parse_form("-3*dtheta1^dtheta2", M),
                              [DifferentialForm.zero(M, 0)] * 2, A)
    assert good.ok
    bad = cartan_equiv_check(omega, mu, omega, shifted, parse_form("3*dtheta1^dtheta2", M),
                             [DifferentialForm.zero(M, 0)] * 2, A)
    assert bad.failed_checks() == {"map difference"}
