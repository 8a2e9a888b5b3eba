from fractions import Fraction

import pytest
from hypothesis import given

import gen
from momap.forms import DifferentialForm, VectorField
from momap.parser import ParseError, parse_expression, parse_form, parse_scalar, parse_vector_field
from momap.scalars import ModelManifold, ScalarFn

M = ModelManifold(2, 1)


def test_examples():
    f = parse_form("z1*dtheta2 + dtheta1", M)
    assert f == DifferentialForm(M, 1, {(1,): ScalarFn.variable(M, "z1"), (0,): 1})
    assert not parse_form("dtheta1^dtheta1", M)
    g = parse_form("sin(theta1+2*theta2)*dz1", M)
    assert g.coefficient((2,)) == ScalarFn.sin(M, (1, 2))


def test_precedence():
    assert parse_scalar("-z1^2", M) == -(ScalarFn.variable(M, "z1") ** 2)
    assert parse_scalar("1 - 2*z1 + 3", M) == ScalarFn.variable(M, "z1") * -2 + 4
    assert parse_form("z1*dtheta1^dz1", M) == parse_form("(z1*dtheta1)^dz1", M)
    assert parse_scalar("1/2*z1", M) == ScalarFn.variable(M, "z1") * Fraction(1, 2)


def test_vector_fields():
    v = parse_vector_field("z1*par_theta1 - par_z1", M)
    assert v == VectorField(M, {0: ScalarFn.variable(M, "z1"), 2: -1})


@pytest.mark.parametrize("text, message, col", [
    ("theta1", "only appear inside", 1),
    ("dtheta1*dtheta2", "'*' needs a function", 8),
    ("dz2", "does not exist", 1),
    ("z1 + dz1", "cannot add forms of degree", 4),
    ("par_z1 + dz1", "cannot add a vector field", 8),
    ("sin(z1)", "expected theta", 5),
    ("(z1", "expected ')'", 4),
    ("z1 $ 2", "unexpected character", 4),
    ("", "empty expression", 1),
    ("foo", "unknown name", 1),
])
def test_positioned_errors(text, message, col):
    with pytest.raises(ParseError) as err:
        parse_expression(text, M)
    assert message in str(err.value)
    assert err.value.line == 1 and err.value.col == col


def test_degree_errors():
    with pytest.raises(ParseError):
        parse_form("dtheta1", M, 2)
    with pytest.raises(ParseError):
        parse_form("par_z1", M)
    with pytest.raises(ParseError):
        parse_vector_field("dz1", M)


@given(gen.rngs)
def test_round_trip_forms(rng):
    Mr = gen.manifold(rng)
    alpha = gen.any_form(rng, Mr, terms=3)
    assert parse_form(str(alpha), Mr, alpha.degree) == alpha


@given(gen.rngs)
def test_round_trip_fields(rng):
    Mr = gen.manifold(rng)
    v = gen.field(rng, Mr, terms=3)
    assert parse_vector_field(str(v), Mr) == v


@given(gen.rngs)
def test_round_trip_with_parameters(rng):
    Mr = gen.manifold(rng)
    s = ScalarFn.variable(Mr, rng.choice(["s", "t"]))
    f = gen.scalar(rng, Mr) * s + gen.scalar(rng, Mr)
    assert parse_scalar(str(f), Mr) == f
