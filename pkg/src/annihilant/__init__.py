"""Particular solutions of constant-coefficient PDEs by integration and annihilation."""
from .coefficient import Coefficient
from .errors import (
    AnnihilantError,
    ConditionError,
    DimensionError,
    OutOfClassError,
    ParseError,
    UnboundError,
    UnsupportedError,
    VerificationError,
)
from .expr import Atom, Expr, Term, antiderivative, derivative, equals, is_zero, proportional
from .formatting import format_expr, from_json, to_json
from .helmholtz import PotentialMatrix, VectorField, decompose
from .operators import (
    LinDiffOp,
    apply,
    make_dalembert,
    make_generalized_laplacian,
    make_helmholtz,
    make_incomplete,
    make_laplacian,
    op_add,
    op_compose,
    op_pow,
)
from .parsing import parse
from .solver import (
    Problem,
    SolutionPlan,
    select_strategy,
    solve,
    solve_generalized_helmholtz,
    solve_generalized_polyharmonic,
    solve_poisson,
    solve_polyharmonic,
    solve_wave,
)

__all__ = [
    "Coefficient",
    "AnnihilantError",
    "ConditionError",
    "DimensionError",
    "OutOfClassError",
    "ParseError",
    "UnboundError",
    "UnsupportedError",
    "VerificationError",
    "Atom",
    "Expr",
    "Term",
    "antiderivative",
    "derivative",
    "equals",
    "is_zero",
    "proportional",
    "format_expr",
    "from_json",
    "to_json",
    "PotentialMatrix",
    "VectorField",
    "decompose",
    "LinDiffOp",
    "apply",
    "make_dalembert",
    "make_generalized_laplacian",
    "make_helmholtz",
    "make_incomplete",
    "make_laplacian",
    "op_add",
    "op_compose",
    "op_pow",
    "parse",
    "Problem",
    "SolutionPlan",
    "select_strategy",
    "solve",
    "solve_generalized_helmholtz",
    "solve_generalized_polyharmonic",
    "solve_poisson",
    "solve_polyharmonic",
    "solve_wave",
]

__version__ = "0.1.0"
