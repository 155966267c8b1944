"""Independent checks of candidate particular solutions.

The symbolic check applies the operator exactly; the numeric check uses
central finite differences evaluated in extended precision at seeded rational
points of ``[-1, 1]^n``.  The default stencils are fourth-order accurate in
``h``; ``accuracy=2`` gives the classic three-point family.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

import mpmath

from .errors import UnboundError
from .expr import Expr
from .operators import LinDiffOp, apply_pow, op_pow

DEFAULT_H = Fraction(1, 1000)
DEFAULT_TOL = 1e-6
DEFAULT_ACCURACY = 4


def _operator(D) -> LinDiffOp:
    # accepts a solver Problem as the descriptor
    return getattr(D, "base_operator", D)


def symbolic_residual(D, k: int, Q: Expr, q: Expr) -> Expr:
    """``D^k Q - q`` in canonical form; zero iff ``Q`` is a particular solution."""
    return apply_pow(_operator(D), k, Q) - q


def harmonic_difference(Q1: Expr, Q2: Expr, D, k: int = 1) -> bool:
    """True when ``Q1 - Q2`` is annihilated by ``D^k``."""
    return apply_pow(_operator(D), k, Q1 - Q2).is_zero()


@lru_cache(maxsize=None)
def stencil(order: int, accuracy: int = DEFAULT_ACCURACY) -> tuple[tuple[int, Fraction], ...]:
    """Central-difference weights ``(offset, w)`` for ``d^order`` with O(h^accuracy) error.

    Weights solve ``sum_s w_s s^j = order! [j == order]`` on offsets ``-P..P``.
    """
    if accuracy < 2 or accuracy % 2:
        raise ValueError("stencil accuracy must be a positive even integer")
    if order == 0:
        return ((0, Fraction(1)),)
    P = (order + 1) // 2 + accuracy // 2 - 1
    offsets = list(range(-P, P + 1))
    size = len(offsets)
    rows = [[Fraction(s) ** j for s in offsets] + [Fraction(math.factorial(order) if j == order else 0)]
            for j in range(size)]
    for col in range(size):
        pivot = next(r for r in range(col, size) if rows[r][col] != 0)
        rows[col], rows[pivot] = rows[pivot], rows[col]
        pv = rows[col][col]
        rows[col] = [x / pv for x in rows[col]]
        for r in range(size):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
    return tuple((s, rows[i][size]) for i, s in enumerate(offsets) if rows[i][size] != 0)


def sample_points(coords, n_points: int, seed: int = 0) -> list[dict[str, Fraction]]:
    """Seeded rational points in ``[-1, 1]^n`` with denominators dividing 1000."""
    rng = random.Random(seed)
    return [{c: Fraction(rng.randint(-1000, 1000), 1000) for c in coords} for _ in range(n_points)]


def numeric_residual(D, k: int, Q: Expr, q: Expr, n_points: int = 10, h=DEFAULT_H,
                     param_values: Mapping | None = None, seed: int = 0, dps: int = 60,
                     accuracy: int = DEFAULT_ACCURACY) -> float:
    """Max over sample points of ``|FD(D^k) Q - q|``."""
    h = Fraction(h)
    if h <= 0:
        raise ValueError("step h must be positive")
    op = op_pow(_operator(D), k)
    params = dict(param_values or {})
    needed = set(Q.params) | set(q.params) | {n for _o, c in op.items() for n, _e in c.params}
    missing = sorted(needed - set(params))
    if missing:
        raise UnboundError(f"unbound parameters: {', '.join(missing)}")
    terms = [(orders, c.evaluate(params)) for orders, c in op.items()]
    coords = op.coords
    worst = mpmath.mpf(0)
    with mpmath.workdps(dps):
        for point in sample_points(coords, n_points, seed):
            cache: dict = {}

            def value(offsets):
                if offsets not in cache:
                    shifted = {c: point[c] + s * h for c, s in zip(coords, offsets)}
                    cache[offsets] = Q.eval(shifted, params, dps)
                return cache[offsets]

            total = mpmath.mpf(0)
            for orders, c in terms:
                per_axis = [stencil(o, accuracy) for o in orders]
                acc = mpmath.mpf(0)
                for combo in itertools.product(*per_axis):
                    w = Fraction(1)
                    for _s, ws in combo:
                        w *= ws
                    acc += mpmath.mpf(w.numerator) / w.denominator * value(tuple(s for s, _w in combo))
                scale = c / h ** sum(orders)
                total += acc * mpmath.mpf(scale.numerator) / scale.denominator
            r = abs(total - q.eval(point, params, dps))
            if r > worst:
                worst = r
    return float(worst)


@dataclass(frozen=True)
class ResidualReport:
    symbolic_residual: Expr
    numeric_max_abs: float
    points_checked: int
    tolerance: float = DEFAULT_TOL

    @property
    def symbolic_zero(self) -> bool:
        return self.symbolic_residual.is_zero()

    @property
    def passed(self) -> bool:
        return self.symbolic_zero and self.numeric_max_abs <= self.tolerance

    def to_json(self) -> dict:
        return {"symbolic_zero": self.symbolic_zero, "numeric_max": self.numeric_max_abs,
                "points": self.points_checked, "passed": self.passed}


def check(D, k: int, Q: Expr, q: Expr, n_points: int = 10, h=DEFAULT_H, tol: float = DEFAULT_TOL,
          param_values: Mapping | None = None, seed: int = 0) -> ResidualReport:
    """Run both verifiers and bundle the outcome."""
    sym = symbolic_residual(D, k, Q, q)
    num = numeric_residual(D, k, Q, q, n_points, h, param_values, seed) if n_points else 0.0
    return ResidualReport(sym, num, n_points, tol)
