"""Linear differential operators with constant coefficients.

An operator is a polynomial in the commuting symbols ``d/dc`` for the
coordinates in ``coords``.  Coefficients are rationals times parameter
monomials; one derivative multi-index may carry several parameter monomials
(``Delta + nu + 1`` has identity coefficient ``nu + 1``).
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .coefficient import Coefficient, mul_params
from .errors import DimensionError
from .expr import TIME, Expr, coord_index, coord_name, spatial_coords

Orders = tuple[int, ...]


class LinDiffOp:
    __slots__ = ("coords", "_terms")

    def __init__(self, coords: Sequence[str], terms: Mapping | Iterable = ()):
        coords = tuple(coord_name(coord_index(c)) for c in coords)
        if len(set(coords)) != len(coords):
            raise ValueError("duplicate coordinates")
        self.coords = coords
        if isinstance(terms, Mapping):
            terms = terms.items()
        acc: dict = {}
        for key, c in terms:
            orders, params = key
            if len(orders) != len(coords) or any(o < 0 for o in orders):
                raise DimensionError(f"multi-index {orders} does not match coordinates {coords}")
            key = (tuple(orders), tuple(params))
            acc[key] = acc.get(key, 0) + Fraction(c)
        self._terms = tuple(sorted((k, v) for k, v in acc.items() if v != 0))

    @classmethod
    def from_coefficients(cls, coords, coeffs: Mapping[Orders, object]) -> "LinDiffOp":
        items = []
        for orders, c in coeffs.items():
            c = Coefficient.coerce(c)
            items.append(((tuple(orders), c.params), c.value))
        return cls(coords, items)

    def items(self):
        """Pairs ``(orders, Coefficient)``; an index may repeat with other parameter monomials."""
        return [(orders, Coefficient(v, params)) for (orders, params), v in self._terms]

    def coefficient(self, orders: Orders) -> Coefficient:
        found = [Coefficient(v, p) for (o, p), v in self._terms if o == tuple(orders)]
        if not found:
            return Coefficient(0)
        if len(found) > 1:
            raise ValueError(f"coefficient of {orders} is a sum of parameter monomials")
        return found[0]

    def as_dict(self) -> dict[Orders, Coefficient]:
        return {o: self.coefficient(o) for o in {o for (o, _p), _v in self._terms}}

    def is_zero(self) -> bool:
        return not self._terms

    def order(self) -> int:
        return max((sum(o) for (o, _p), _v in self._terms), default=0)

    def __eq__(self, other):
        if not isinstance(other, LinDiffOp):
            return NotImplemented
        return self.coords == other.coords and self._terms == other._terms

    def __hash__(self):
        return hash((self.coords, self._terms))

    def __add__(self, other):
        return op_add(self, other)

    def __neg__(self):
        return LinDiffOp(self.coords, (((o, p), -v) for (o, p), v in self._terms))

    def __sub__(self, other):
        return op_add(self, -other)

    def __mul__(self, other):
        if isinstance(other, LinDiffOp):
            return op_compose(self, other)
        return op_compose(self, make_const(Coefficient.coerce(other), self.coords))

    __rmul__ = __mul__

    def __pow__(self, p):
        return op_pow(self, p)

    def __call__(self, e: Expr) -> Expr:
        return apply(self, e)

    def __repr__(self):
        parts = []
        for orders, c in self.items():
            d = "".join(f"d{n}" + (f"^{k}" if k > 1 else "") for n, k in zip(self.coords, orders) if k)
            parts.append(f"{c}" + (f"*{d}" if d else ""))
        return f"LinDiffOp[{', '.join(self.coords)}]({' + '.join(parts) or '0'})"

    def to_json(self) -> dict:
        return {"coords": list(self.coords),
                "terms": [{"orders": list(o),
                           "coeff": {"num": str(v.numerator), "den": str(v.denominator),
                                     "params": dict(p)}}
                          for (o, p), v in self._terms]}

    @classmethod
    def from_json(cls, data) -> "LinDiffOp":
        if isinstance(data, str):
            data = json.loads(data)
        items = []
        for t in data["terms"]:
            c = t["coeff"]
            items.append(((tuple(int(x) for x in t["orders"]),
                           tuple(sorted((str(n), int(x)) for n, x in c.get("params", {}).items() if x))),
                          Fraction(int(c["num"]), int(c["den"]))))
        return cls(data["coords"], items)


def _unit(coords, i, order) -> Orders:
    return tuple(order if j == i else 0 for j in range(len(coords)))


def _coords_for(n: int, time: bool = False) -> tuple[str, ...]:
    return ((TIME,) if time else ()) + spatial_coords(n)


def make_const(v, coords: Sequence[str]) -> LinDiffOp:
    v = Coefficient.coerce(v)
    return LinDiffOp(coords, [((tuple(0 for _ in coords), v.params), v.value)])


def identity(coords: Sequence[str]) -> LinDiffOp:
    return make_const(1, coords)


def make_partial(coord, coords: Sequence[str], order: int = 1, coeff=1) -> LinDiffOp:
    coords = tuple(coord_name(coord_index(c)) for c in coords)
    name = coord_name(coord_index(coord))
    c = Coefficient.coerce(coeff)
    return LinDiffOp(coords, [((_unit(coords, coords.index(name), order), c.params), c.value)])


def make_generalized_laplacian(weights: Sequence, coords: Sequence[str] | None = None) -> LinDiffOp:
    """``sum_i w_i d_i^2``; coordinates default to ``x1..xn``."""
    weights = [Coefficient.coerce(w) for w in weights]
    if coords is None:
        coords = spatial_coords(len(weights))
    if len(coords) != len(weights):
        raise DimensionError("one weight per coordinate required")
    if any(w.is_zero() for w in weights):
        raise ValueError("Laplacian weights must be nonzero")
    return LinDiffOp(coords, [((_unit(coords, i, 2), w.params), w.value) for i, w in enumerate(weights)])


def make_laplacian(n: int) -> LinDiffOp:
    return make_generalized_laplacian([1] * n)


def make_incomplete(weights: Sequence, m, coords: Sequence[str] | None = None) -> LinDiffOp:
    """Generalized Laplacian with coordinate ``m`` left out.

    ``m`` is a coordinate name or a 1-based position in ``coords``.
    """
    weights = [Coefficient.coerce(w) for w in weights]
    if coords is None:
        coords = spatial_coords(len(weights))
    coords = tuple(coord_name(coord_index(c)) for c in coords)
    if any(w.is_zero() for w in weights):
        raise ValueError("Laplacian weights must be nonzero")
    skip = m - 1 if isinstance(m, int) else coords.index(coord_name(coord_index(m)))
    return LinDiffOp(coords, [((_unit(coords, i, 2), w.params), w.value)
                              for i, w in enumerate(weights) if i != skip])


def wave_weights(c, spatial_n: int = 3) -> list[Coefficient]:
    c = Coefficient.coerce(c)
    if c.is_zero():
        raise ValueError("wave speed must be nonzero")
    return [c ** -2] + [Coefficient(-1)] * spatial_n


def make_dalembert(c, spatial_n: int = 3) -> LinDiffOp:
    """``d_t^2/c^2 - sum_i d_i^2`` with the time coordinate first."""
    return make_generalized_laplacian(wave_weights(c, spatial_n), _coords_for(spatial_n, time=True))


def make_helmholtz(j: int, nu, n: int) -> LinDiffOp:
    """``Delta^j + nu`` in ``n`` spatial dimensions."""
    if j < 1:
        raise ValueError("Helmholtz power j must be >= 1")
    lap = make_laplacian(n)
    return op_add(op_pow(lap, j), make_const(nu, lap.coords))


def _check_same(a: LinDiffOp, b: LinDiffOp):
    if a.coords != b.coords:
        raise DimensionError(f"operators act on different coordinates: {a.coords} vs {b.coords}")


def op_add(a: LinDiffOp, b: LinDiffOp) -> LinDiffOp:
    _check_same(a, b)
    return LinDiffOp(a.coords, a._terms + b._terms)


def op_compose(a: LinDiffOp, b: LinDiffOp) -> LinDiffOp:
    _check_same(a, b)
    acc: dict = {}
    for (o1, p1), v1 in a._terms:
        for (o2, p2), v2 in b._terms:
            key = (tuple(x + y for x, y in zip(o1, o2)), mul_params(p1, p2))
            acc[key] = acc.get(key, 0) + v1 * v2
    return LinDiffOp(a.coords, acc)


def op_pow(a: LinDiffOp, p: int) -> LinDiffOp:
    if p < 0:
        raise ValueError("operator powers must be non-negative")
    result = identity(a.coords)
    base = a
    while p:
        if p & 1:
            result = op_compose(result, base)
        p >>= 1
        if p:
            base = op_compose(base, base)
    return result


def apply(op: LinDiffOp, e: Expr) -> Expr:
    """Apply ``op`` to ``e`` exactly."""
    allowed = {coord_index(c) for c in op.coords}
    extra = e.coord_indices() - allowed
    if extra:
        names = ", ".join(coord_name(i) for i in sorted(extra))
        raise DimensionError(f"expression uses {names} but the operator acts on {', '.join(op.coords)}")
    items: list = []
    cache: dict = {}
    for (orders, params), v in op._terms:
        if orders not in cache:
            d = e
            for name, k in zip(op.coords, orders):
                if k:
                    d = d.derivative(name, k)
            cache[orders] = d
        items.extend(cache[orders].scale(Coefficient(v, params)).items())
    return Expr(items)


def apply_pow(op: LinDiffOp, k: int, e: Expr) -> Expr:
    """``op`` applied ``k`` times; equal to ``apply(op_pow(op, k), e)``."""
    for _ in range(k):
        e = apply(op, e)
    return e
