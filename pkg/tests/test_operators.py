import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annihilant import Coefficient, DimensionError
from annihilant.expr import Expr
from annihilant.operators import (
    LinDiffOp, apply, apply_pow, identity, make_const, make_dalembert, make_generalized_laplacian,
    make_helmholtz, make_incomplete, make_laplacian, make_partial, op_add, op_compose, op_pow,
)
from annihilant.parsing import parse

from .conftest import exprs

XY = ("x1", "x2")


def test_laplacian_coefficients():
    assert make_generalized_laplacian((1, 1)).as_dict() == {(2, 0): Coefficient(1), (0, 2): Coefficient(1)}
    assert make_laplacian(2) == make_generalized_laplacian((1, 1))


def test_incomplete_laplacian():
    op = make_incomplete((1, 1, 1), 2)
    assert op.as_dict() == {(2, 0, 0): Coefficient(1), (0, 0, 2): Coefficient(1)}
    assert make_incomplete((1, 1, 1), "x2") == op


def test_dalembert_time_first():
    op = make_dalembert("c", 3)
    assert op.coords == ("t", "x1", "x2", "x3")
    assert op.as_dict() == {
        (2, 0, 0, 0): Coefficient(1, {"c": -2}),
        (0, 2, 0, 0): Coefficient(-1),
        (0, 0, 2, 0): Coefficient(-1),
        (0, 0, 0, 2): Coefficient(-1),
    }


def test_dalembert_from_splitting():
    coords = ("t", "x1", "x2", "x3")
    A = make_partial("t", coords, 2, Coefficient(1, {"c": -2}))
    B = make_generalized_laplacian([-1, -1, -1], coords[1:])
    B = LinDiffOp(coords, [(((0,) + o, p), v) for (o, p), v in B._terms])
    assert op_add(A, B) == make_dalembert("c", 3)


def test_builder_errors():
    with pytest.raises(ValueError):
        make_generalized_laplacian((1, 0))
    with pytest.raises(ValueError):
        make_incomplete((1, 0, 1), 1)
    with pytest.raises(ValueError):
        make_helmholtz(0, "nu", 2)
    with pytest.raises(ValueError):
        make_dalembert(0, 3)


def test_helmholtz_operator():
    op = make_helmholtz(2, "nu", 2)
    assert op.as_dict() == {
        (4, 0): Coefficient(1), (2, 2): Coefficient(2), (0, 4): Coefficient(1),
        (0, 0): Coefficient.param("nu"),
    }


def test_identity_and_zero_power():
    e = parse("x1^3*sin(x2) + exp(x1)", 2)
    assert apply(op_pow(make_laplacian(2), 0), e) == e
    assert op_pow(make_laplacian(2), 0) == identity(XY)
    assert LinDiffOp(XY).is_zero()


def test_apply_examples():
    lap = make_laplacian(2)
    assert apply(lap, parse("x1^2*x2^10", 2)) == parse("2*x2^10 + 90*x1^2*x2^8", 2)
    Q = parse("c^2*x1^2*x2*(-2*cos(t) - t*sin(t)) + 2*c^4*x2*(4*cos(t) + t*sin(t))", 3, ["c"])
    assert apply(make_dalembert("c", 3), Q) == parse("t*sin(t)*x1^2*x2", 2)
    W = parse("x1^2*x2^14", 2).scale(Fraction(math.factorial(10), math.factorial(14)))
    assert apply(op_pow(make_incomplete((1, 1), 2), 2), W).is_zero()


def test_apply_dimension_mismatch():
    with pytest.raises(DimensionError):
        apply(make_laplacian(2), parse("x3", 3))
    with pytest.raises(DimensionError):
        op_add(make_laplacian(2), make_laplacian(3))


def test_json_round_trip():
    op = op_add(make_dalembert("c", 2), make_const(Coefficient(Fraction(3, 4), {"nu": 2}), ("t", "x1", "x2")))
    assert LinDiffOp.from_json(op.to_json()) == op


@st.composite
def small_ops(draw, coords=XY):
    terms = {}
    for _ in range(draw(st.integers(1, 3))):
        orders = tuple(draw(st.integers(0, 2)) for _ in coords)
        terms[orders] = Fraction(draw(st.integers(-4, 4)), draw(st.integers(1, 3)))
    return LinDiffOp.from_coefficients(coords, terms)


@given(small_ops(), small_ops())
@settings(max_examples=100, deadline=None)
def test_constant_coefficient_operators_commute(a, b):
    assert op_compose(a, b) == op_compose(b, a)


@given(small_ops(), small_ops(), exprs(n=2))
@settings(max_examples=100, deadline=None)
def test_composition_law(a, b, e):
    assert apply(op_compose(a, b), e) == apply(a, apply(b, e))


@given(small_ops(), st.integers(0, 3), exprs(n=2, max_terms=2))
@settings(max_examples=60, deadline=None)
def test_power_law(a, p, e):
    assert apply(op_pow(a, p), e) == apply_pow(a, p, e)


@given(small_ops(), exprs(n=2), exprs(n=2))
@settings(max_examples=100, deadline=None)
def test_linearity(a, e1, e2):
    assert apply(a, e1 + e2) == apply(a, e1) + apply(a, e2)


@pytest.mark.parametrize("weights", [(1, 1, 1), (2, Fraction(-1, 3), 5), ("c", -1, -1)])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_annihilator_splitting_reconstructs_operator(weights, m):
    coords = ("x1", "x2", "x3")
    w = Coefficient.coerce(weights[m - 1])
    A = make_partial(coords[m - 1], coords, 2, w)
    assert op_add(A, make_incomplete(weights, m)) == make_generalized_laplacian(weights)


def test_helmholtz_splitting_reconstructs_operator():
    A = make_const("nu", XY)
    B = op_pow(make_laplacian(2), 3)
    assert op_add(A, B) == make_helmholtz(3, "nu", 2)


def test_operator_on_time_only_expression():
    # spatial operator ignores an expression that does not mention its coordinates
    assert apply(make_laplacian(2), Expr.constant(5)).is_zero()
