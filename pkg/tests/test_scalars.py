from fractions import Fraction

import pytest
from hypothesis import given

import gen
from momap.scalars import ManifoldMismatch, ModelManifold, Point, ScalarFn, format_scalar

randoms = gen.rngs
T2R1 = ModelManifold(2, 1)


def test_trig_products_expand_exactly():
    s = ScalarFn.sin(T2R1, (1, 0))
    c = ScalarFn.cos(T2R1, (1, 0))
    assert s * c == ScalarFn.sin(T2R1, (2, 0)) * Fraction(1, 2)
    assert s * s + c * c == ScalarFn.constant(T2R1, 1)


def test_reality_is_enforced():
    key = (1, 0, 0, 0, 0)
    with pytest.raises(ValueError):
        ScalarFn(T2R1, {key: 1})


def test_theta_is_not_a_global_function():
    with pytest.raises(ValueError):
        ScalarFn.variable(T2R1, "theta1")


def test_partials_and_parameters():
    z = ScalarFn.variable(T2R1, "z1")
    s = ScalarFn.variable(T2R1, "s")
    f = z ** 2 * ScalarFn.sin(T2R1, (0, 1)) + s * z
    assert f.partial("z1") == z * ScalarFn.sin(T2R1, (0, 1)) * 2 + s
    assert f.partial("theta2") == z ** 2 * ScalarFn.cos(T2R1, (0, 1))
    assert f.integrate_param("s") == z * Fraction(1, 2) + z ** 2 * ScalarFn.sin(T2R1, (0, 1))
    assert f.substitute("s", 2) == z ** 2 * ScalarFn.sin(T2R1, (0, 1)) + z * 2


def test_eval_at_quarter_periods_and_rejects_others():
    f = ScalarFn.sin(T2R1, (1, 0)) + ScalarFn.variable(T2R1, "z1")
    assert f.eval_at(Point((Fraction(1, 2), 0), (3,))) == 4
    with pytest.raises(ValueError):
        f.eval_at(Point((Fraction(1, 3), 0), (0,)))


def test_mismatched_manifolds_raise():
    with pytest.raises(ManifoldMismatch):
        ScalarFn.constant(T2R1, 1) + ScalarFn.constant(ModelManifold(1, 1), 1)


def test_printing_is_canonical():
    f = ScalarFn.sin(T2R1, (1, 2)) * 3 - ScalarFn.variable(T2R1, "z1")
    assert format_scalar(f) == str(f)
    assert str(ScalarFn.zero(T2R1)) == "0"


@given(randoms)
def test_ring_axioms(rng):
    M = gen.manifold(rng)
    f, g, h = (gen.scalar(rng, M) for _ in range(3))
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f * g == g * f
    assert f + g == g + f
    assert f - f == ScalarFn.zero(M)


@given(randoms)
def test_mixed_partials_commute(rng):
    M = gen.manifold(rng)
    f = gen.scalar(rng, M, 3)
    for i in range(M.dim):
        for j in range(M.dim):
            assert f.partial(i).partial(j) == f.partial(j).partial(i)


@given(randoms)
def test_partial_is_a_derivation(rng):
    M = gen.manifold(rng)
    f, g = gen.scalar(rng, M), gen.scalar(rng, M)
    for i in range(M.dim):
        assert (f * g).partial(i) == f.partial(i) * g + f * g.partial(i)


@given(randoms)
def test_eval_is_a_ring_homomorphism(rng):
    M = gen.manifold(rng)
    f, g = gen.scalar(rng, M), gen.scalar(rng, M)
    p = Point(tuple(Fraction(rng.randint(0, 7), 2) for _ in range(M.torus_dim)),
              tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(M.affine_dim)))
    assert (f * g).eval_at(p) == f.eval_at(p) * g.eval_at(p)
    assert (f + g).eval_at(p) == f.eval_at(p) + g.eval_at(p)


@given(randoms)
def test_circle_average_of_derivative_vanishes(rng):
    M = gen.manifold(rng, min_dim=1)
    if not M.torus_dim:
        M = ModelManifold(1, M.affine_dim)
    f = gen.scalar(rng, M, 3)
    for i in range(M.torus_dim):
        assert not f.partial(i).theta_average(i)


@given(randoms)
def test_integral_of_parameter_derivative_is_endpoint_difference(rng):
    M = gen.manifold(rng)
    s = ScalarFn.variable(M, "s")
    g = gen.scalar(rng, M) * s ** rng.randint(0, 3) + gen.scalar(rng, M) * s
    assert g.partial("s").integrate_param("s") == g.substitute("s", 1) - g.substitute("s", 0)
