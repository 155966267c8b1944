"""Integration-annihilator engine.

Given ``D = A + B`` with constant coefficients, a function ``W`` and an integer
``lam`` such that ``A^(lam+k) W = q`` and ``B^(lam+1) W = 0``, the weighted sum

    Q = sum_{p=0}^{lam} (-1)^p C(k+p-1, p) A^(lam-p) B^p W

satisfies ``D^k Q = q``.  The high-level solvers split ``q`` into terms, pick
``A``, ``B``, ``lam`` and ``W`` per term (or use the eigenfunction shortcut),
and sum the per-term solutions.  Every result is checked exactly before it is
returned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .coefficient import Coefficient
from .errors import ConditionError, DimensionError, UnsupportedError, VerificationError
from .expr import NONE, Expr, coord_index, coord_name, proportional, spatial_coords
from .operators import (
    LinDiffOp,
    apply,
    apply_pow,
    make_const,
    make_generalized_laplacian,
    make_incomplete,
    make_laplacian,
    make_partial,
    op_add,
    op_pow,
    wave_weights,
)

ROUTES = ("eigenfunction", "annihilator", "relaxed_annihilator", "unsupported")


def binom(a: int, b: int) -> int:
    """Binomial coefficient extended to negative upper index; zero for ``b < 0``."""
    if b < 0:
        return 0
    if a >= 0:
        return math.comb(a, b) if b <= a else 0
    return (-1) ** b * math.comb(b - a - 1, b)


def check_binomial_identity(a_max: int = 64) -> bool:
    """C(a,b) - C(a-1,b-1) == C(a-1,b) for all 0 <= b <= a <= a_max."""
    return all(binom(a, b) - binom(a - 1, b - 1) == binom(a - 1, b)
               for a in range(a_max + 1) for b in range(a + 1))


def theorem_4_1(A: LinDiffOp, B: LinDiffOp, k: int, lam: int, W: Expr, verify: bool = True) -> Expr:
    """Particular solution of ``(A + B)^k Q = A^(lam+k) W`` when ``B^(lam+1)`` annihilates ``W``.

    Raises :class:`ConditionError` carrying ``B^(lam+1) W`` if the annihilator
    condition fails.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    b_powers = [W]
    for _ in range(lam + 1):
        b_powers.append(apply(B, b_powers[-1]))
    if not b_powers[-1].is_zero():
        raise ConditionError(f"annihilator condition violated: B^{lam + 1} W = {b_powers[-1]}",
                             b_powers[-1])
    items: list = []
    for p in range(lam + 1):
        weight = (-1) ** p * binom(k + p - 1, p)
        items.extend(apply_pow(A, lam - p, b_powers[p]).scale(weight).items())
    Q = Expr(items)
    if verify:
        lhs = apply_pow(op_add(A, B), k, Q)
        rhs = apply_pow(A, lam + k, W)
        if lhs != rhs:
            raise VerificationError("D^k Q != A^(lam+k) W", lhs - rhs)
    return Q


def theorem_4_2(A: LinDiffOp, B: LinDiffOp, lam: int, W: Expr, u, verify: bool = True) -> Expr:
    """Solution of ``(A + B) Q = q`` with ``q = A^(lam+1) W`` under the relaxed condition

    ``B^(lam+1) W = (-1)^lam (u - 1) q``, giving ``Q = (1/u) sum_p (-1)^p A^(lam-p) B^p W``.
    """
    u = Coefficient.coerce(u)
    if u.is_zero():
        raise ValueError("u must be nonzero")
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    q = apply_pow(A, lam + 1, W)
    b_powers = [W]
    for _ in range(lam + 1):
        b_powers.append(apply(B, b_powers[-1]))
    expected = (q.scale(u) - q).scale((-1) ** lam)
    if b_powers[-1] != expected:
        raise ConditionError("relaxed annihilator condition violated",
                             b_powers[-1] - expected)
    items: list = []
    for p in range(lam + 1):
        items.extend(apply_pow(A, lam - p, b_powers[p]).scale((-1) ** p).items())
    Q = Expr(items).scale(u.inverse())
    if verify:
        residual = apply(op_add(A, B), Q) - q
        if not residual.is_zero():
            raise VerificationError("(A + B) Q != q", residual)
    return Q


def lemma_4_3(D: LinDiffOp, k: int, q: Expr) -> Expr:
    """``q / v^k`` when ``D q = v q`` with a nonzero coefficient ``v``."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    if q.is_zero():
        return Expr()
    Dq = apply(D, q)
    v = proportional(Dq, q)
    if v is None:
        if len(q) == 1 and {a for (a, _p), _c in Dq.items()} == {q.items()[0][0][0]}:
            raise ConditionError(
                f"eigenvalue of {q} is a sum of parameter monomials; bind the parameters numerically")
        raise ConditionError(f"{q} is not an eigenfunction of the operator")
    if v.is_zero():
        raise ConditionError(f"eigenvalue of {q} is zero")
    Q = q.scale(v ** -k)
    residual = apply_pow(D, k, Q) - q
    if not residual.is_zero():
        raise VerificationError("D^k Q != q", residual)
    return Q


# ---------------------------------------------------------------------------
# problem descriptors and strategy


@dataclass(frozen=True)
class Problem:
    """``(sum_i w_i d_i^2)^k Q = q`` or ``(Delta^j + nu)^k Q = q`` over ``coords``."""

    kind: str
    coords: tuple[str, ...]
    k: int = 1
    weights: tuple[Coefficient, ...] = ()
    j: int = 1
    nu: Coefficient | None = None

    def __post_init__(self):
        if self.kind not in ("polyharmonic", "helmholtz"):
            raise ValueError(f"unknown problem kind {self.kind!r}")
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        if self.kind == "polyharmonic":
            if len(self.weights) != len(self.coords):
                raise DimensionError("one weight per coordinate required")
            if any(w.is_zero() for w in self.weights):
                raise ValueError("Laplacian weights must be nonzero")
        else:
            if self.j < 1:
                raise ValueError("j must be a positive integer")
            if self.nu is None or self.nu.is_zero():
                raise ValueError("nu must be nonzero")

    @classmethod
    def polyharmonic(cls, weights: Sequence | None = None, k: int = 1, n: int | None = None,
                     coords: Sequence[str] | None = None) -> "Problem":
        if coords is None:
            if n is None:
                n = len(weights)
            coords = spatial_coords(n)
        coords = tuple(coord_name(coord_index(c)) for c in coords)
        if weights is None:
            weights = [1] * len(coords)
        return cls("polyharmonic", coords, k, tuple(Coefficient.coerce(w) for w in weights))

    @classmethod
    def wave(cls, c="c", spatial_n: int = 3, k: int = 1) -> "Problem":
        return cls.polyharmonic(wave_weights(c, spatial_n), k, coords=("t",) + spatial_coords(spatial_n))

    @classmethod
    def helmholtz(cls, j: int, k: int, nu, n: int) -> "Problem":
        return cls("helmholtz", spatial_coords(n), k, j=j, nu=Coefficient.coerce(nu))

    @cached_property
    def base_operator(self) -> LinDiffOp:
        if self.kind == "polyharmonic":
            return make_generalized_laplacian(self.weights, self.coords)
        lap = make_laplacian(len(self.coords))
        return op_add(op_pow(lap, self.j), make_const(self.nu, self.coords))

    @cached_property
    def operator(self) -> LinDiffOp:
        """The full operator ``D^k``."""
        return op_pow(self.base_operator, self.k)


@dataclass(frozen=True)
class SolutionPlan:
    """Route chosen for one additive term ``S`` of the inhomogeneity."""

    route: str
    term: Expr
    m: str | None = None
    lam: int = 0
    W: Expr | None = None
    u_or_v: Coefficient | None = None
    reason: str = field(default="", compare=False)


def _ceil_div(num: int, den: int) -> int:
    return math.ceil(Fraction(num, den))


def select_strategy(S: Expr, problem: Problem, forced_m: str | None = None) -> SolutionPlan:
    """Pick the route for a single canonical term ``S``.

    Order: eigenfunction shortcut, then the annihilator route with the
    coordinate ``m`` of highest exponent (lowest index on ties; an exp/trig
    coordinate is forced), otherwise ``unsupported``.
    """
    if len(S) != 1:
        raise ValueError("select_strategy expects a single term")
    coords = problem.coords
    cis = [coord_index(c) for c in coords]
    extra = S.coord_indices() - set(cis)
    if extra:
        raise DimensionError(f"term {S} uses coordinates outside {coords}")

    D = problem.base_operator
    v = proportional(apply(D, S), S)
    if v is not None and not v.is_zero():
        return SolutionPlan("eigenfunction", S, u_or_v=v)

    (atoms, _params), _c = S.items()[0]
    by_ci = {a[0]: a for a in atoms}
    special = [a[0] for a in atoms if a[2] != 0 or a[3] != NONE]
    k = problem.k

    if problem.kind == "helmholtz":
        if special:
            return SolutionPlan("unsupported", S, reason=(
                f"non-polynomial term {S} is not an eigenfunction of Delta^{problem.j} + nu; "
                "bind nu to a number to use the eigenfunction route"))
        beta = sum(a[1] for a in atoms)
        lam = _ceil_div(beta - 1, 2 * problem.j)
        W = S.scale(problem.nu ** (-lam - k))
        return SolutionPlan("annihilator", S, None, lam, W)

    if len(special) > 1:
        names = ", ".join(coord_name(ci) for ci in special)
        return SolutionPlan("unsupported", S, reason=(
            f"term {S} has exp/trig factors on several coordinates ({names}) "
            "and is not an eigenfunction of the operator"))
    if forced_m is not None:
        mi = coord_index(forced_m)
        if mi not in cis:
            raise DimensionError(f"forced coordinate {forced_m} is not one of {coords}")
        if special and special[0] != mi:
            return SolutionPlan("unsupported", S, reason=(
                f"forced coordinate {forced_m} conflicts with the exp/trig factor on "
                f"{coord_name(special[0])}"))
    elif special:
        mi = special[0]
    else:
        powers = [by_ci[ci][1] if ci in by_ci else 0 for ci in cis]
        mi = cis[powers.index(max(powers))]
    beta = sum(a[1] for a in atoms if a[0] != mi)
    lam = _ceil_div(beta - 1, 2)
    w_m = problem.weights[cis.index(mi)]
    m = coord_name(mi)
    W = S.antiderivative(m, 2 * lam + 2 * k).scale(w_m ** (-lam - k))
    return SolutionPlan("annihilator", S, m, lam, W)


def execute_plan(plan: SolutionPlan, problem: Problem) -> Expr:
    if plan.route == "eigenfunction":
        return lemma_4_3(problem.base_operator, problem.k, plan.term)
    if plan.route != "annihilator":
        raise UnsupportedError(f"unsupported inhomogeneity: {plan.reason or plan.term}")
    coords = problem.coords
    if problem.kind == "helmholtz":
        A = make_const(problem.nu, coords)
        B = op_pow(make_laplacian(len(coords)), problem.j)
    else:
        w_m = problem.weights[coords.index(plan.m)]
        A = make_partial(plan.m, coords, 2, w_m)
        B = make_incomplete(problem.weights, plan.m, coords)
    return theorem_4_1(A, B, problem.k, plan.lam, plan.W)


def solve_with_plans(problem: Problem, q: Expr, forced_m: str | None = None
                     ) -> tuple[Expr, list[SolutionPlan]]:
    """Solve ``D^k Q = q`` term by term; returns ``Q`` and the per-term plans."""
    extra = q.coord_indices() - {coord_index(c) for c in problem.coords}
    if extra:
        names = ", ".join(coord_name(i) for i in sorted(extra))
        raise DimensionError(f"inhomogeneity uses {names}, outside {', '.join(problem.coords)}")
    plans = [select_strategy(S, problem, forced_m) for S in q]
    bad = [p for p in plans if p.route == "unsupported"]
    if bad:
        raise UnsupportedError("unsupported inhomogeneity: " + "; ".join(p.reason for p in bad))
    items: list = []
    for plan in plans:
        items.extend(execute_plan(plan, problem).items())
    Q = Expr(items)
    residual = apply_pow(problem.base_operator, problem.k, Q) - q
    if not residual.is_zero():
        raise VerificationError("solution failed its residual check", residual)
    return Q, plans


def solve(problem: Problem, q: Expr, forced_m: str | None = None) -> Expr:
    return solve_with_plans(problem, q, forced_m)[0]


def _infer_n(q: Expr, n: int | None) -> int:
    if n is not None:
        return n
    return max([i for i in q.coord_indices() if i > 0], default=1)


def solve_generalized_polyharmonic(weights: Sequence, k: int, q: Expr,
                                   coords: Sequence[str] | None = None) -> Expr:
    return solve(Problem.polyharmonic(weights, k, coords=coords), q)


def solve_poisson(q: Expr, forced_m: str | None = None, n: int | None = None) -> Expr:
    return solve(Problem.polyharmonic(None, 1, _infer_n(q, n)), q, forced_m)


def solve_polyharmonic(k: int, q: Expr, n: int | None = None) -> Expr:
    return solve(Problem.polyharmonic(None, k, _infer_n(q, n)), q)


def solve_generalized_helmholtz(j: int, k: int, nu, q: Expr, n: int | None = None) -> Expr:
    return solve(Problem.helmholtz(j, k, nu, _infer_n(q, n)), q)


def solve_wave(q: Expr, c="c", spatial_n: int = 3) -> Expr:
    return solve(Problem.wave(c, spatial_n), q)
