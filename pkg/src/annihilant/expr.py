"""Canonical sums of exponential-polynomial-trigonometric terms.

Every term is ``c * P * prod_i x_i**a_i * exp(alpha_i x_i) * trig(beta_i x_i)``
where ``c`` is rational, ``P`` a monomial in formal parameters and ``trig`` is
cos, sin or absent.  The class is closed under products, differentiation and
antidifferentiation, and the canonical form makes equality decidable by
comparing representations.

Internally an atom is the tuple ``(coord_index, power, exp_rate, trig_code,
freq)`` with coordinate index 0 for ``t`` and ``i`` for ``x_i``; a term key is
``(atoms, params)`` and an expression is a sorted tuple of ``(key, value)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

import mpmath

from .coefficient import Coefficient, mul_params, pow_params
from .errors import UnboundError

NONE, COS, SIN = 0, 1, 2
TRIG_NAMES = ("none", "cos", "sin")
TIME = "t"
_COORD_RE = re.compile(r"x([1-9][0-9]*)\Z")
_F0 = Fraction(0)

Coord = Union[str, int]


def coord_index(coord: Coord) -> int:
    if isinstance(coord, int):
        if coord < 0:
            raise ValueError(f"bad coordinate index {coord}")
        return coord
    if coord == TIME:
        return 0
    m = _COORD_RE.match(coord)
    if not m:
        raise ValueError(f"unknown coordinate {coord!r}")
    return int(m.group(1))


def coord_name(index: int) -> str:
    return TIME if index == 0 else f"x{index}"


def spatial_coords(n: int) -> tuple[str, ...]:
    return tuple(f"x{i}" for i in range(1, n + 1))


@dataclass(frozen=True)
class Atom:
    """The factor ``x**power * exp(exp_rate*x) * trig(freq*x)`` of one coordinate."""

    coord: str
    power: int = 0
    exp_rate: Fraction = _F0
    trig: str = "none"
    freq: Fraction = _F0

    def __post_init__(self):
        if self.power < 0:
            raise ValueError("atom power must be non-negative")
        if self.trig not in TRIG_NAMES:
            raise ValueError(f"bad trig kind {self.trig!r}")
        object.__setattr__(self, "exp_rate", Fraction(self.exp_rate))
        object.__setattr__(self, "freq", Fraction(self.freq) if self.trig != "none" else _F0)
        if self.trig != "none" and self.freq <= 0:
            raise ValueError("trig frequency must be positive")

    def _key(self):
        return (coord_index(self.coord), self.power, self.exp_rate,
                TRIG_NAMES.index(self.trig), self.freq)


def _atom_from_tuple(a) -> Atom:
    ci, p, r, code, f = a
    return Atom(coord_name(ci), p, r, TRIG_NAMES[code], f)


@dataclass(frozen=True)
class Term:
    coeff: Coefficient
    atoms: tuple[Atom, ...]


# ---------------------------------------------------------------------------
# term-key kernels


def _normalize_atom(ci, p, r, code, f):
    """Return ``(sign, atom_or_None)``; sign 0 means the factor vanishes."""
    sign = 1
    if code != NONE:
        if f == 0:
            if code == SIN:
                return 0, None
            code = NONE
        elif f < 0:
            f = -f
            if code == SIN:
                sign = -1
    if code == NONE:
        f = _F0
    if p == 0 and r == 0 and code == NONE:
        return sign, None
    return sign, (ci, p, r, code, f)


def _replace_atom(atoms, ci, new):
    out = [a for a in atoms if a[0] != ci]
    if new is not None:
        out.append(new)
        out.sort(key=lambda a: a[0])
    return tuple(out)


def _find(atoms, ci):
    for a in atoms:
        if a[0] == ci:
            return a
    return None


def _mul_atom(a, b):
    ci = a[0]
    p = a[1] + b[1]
    r = a[2] + b[2]
    if a[3] == NONE or b[3] == NONE:
        code, f = (a[3], a[4]) if a[3] != NONE else (b[3], b[4])
        s, atom = _normalize_atom(ci, p, r, code, f)
        return [(Fraction(s), atom)] if s else []
    fa, fb = a[4], b[4]
    half = Fraction(1, 2)
    if a[3] == COS and b[3] == COS:
        parts = [(half, COS, fa - fb), (half, COS, fa + fb)]
    elif a[3] == SIN and b[3] == SIN:
        parts = [(half, COS, fa - fb), (-half, COS, fa + fb)]
    elif a[3] == SIN:
        parts = [(half, SIN, fa + fb), (half, SIN, fa - fb)]
    else:
        parts = [(half, SIN, fa + fb), (-half, SIN, fa - fb)]
    out = []
    for c, code, f in parts:
        s, atom = _normalize_atom(ci, p, r, code, f)
        if s:
            out.append((c * s, atom))
    return out


@lru_cache(maxsize=1 << 16)
def _mul_atoms(x, y):
    """Product of two atom tuples as a tuple of ``(coef, atoms)``."""
    partial = [(Fraction(1), ())]
    ya = {a[0]: a for a in y}
    xa = {a[0]: a for a in x}
    for ci in sorted(set(xa) | set(ya)):
        if ci in xa and ci in ya:
            factors = _mul_atom(xa[ci], ya[ci])
        else:
            factors = [(Fraction(1), xa.get(ci) or ya.get(ci))]
        partial = [(c * fc, atoms + ((atom,) if atom is not None else ()))
                   for c, atoms in partial for fc, atom in factors]
    acc: dict = {}
    for c, atoms in partial:
        acc[atoms] = acc.get(atoms, 0) + c
    return tuple((c, k) for k, c in acc.items() if c != 0)


@lru_cache(maxsize=1 << 16)
def _diff1(atoms, ci):
    a = _find(atoms, ci)
    if a is None:
        return ()
    _, p, r, code, f = a
    out = []
    if p:
        out.append((Fraction(p), (ci, p - 1, r, code, f)))
    if r:
        out.append((r, a))
    if code == COS:
        out.append((-f, (ci, p, r, SIN, f)))
    elif code == SIN:
        out.append((f, (ci, p, r, COS, f)))
    acc: dict = {}
    for c, na in out:
        _, na = _normalize_atom(*na)
        key = _replace_atom(atoms, ci, na)
        acc[key] = acc.get(key, 0) + c
    return tuple((c, k) for k, c in acc.items() if c != 0)


@lru_cache(maxsize=1 << 16)
def _diff(atoms, ci, order):
    if order == 0:
        return ((Fraction(1), atoms),)
    acc: dict = {}
    for c, k in _diff(atoms, ci, order - 1):
        for c2, k2 in _diff1(k, ci):
            acc[k2] = acc.get(k2, 0) + c * c2
    return tuple((c, k) for k, c in acc.items() if c != 0)


def _cdiv(a, b):
    ar, ai = a
    br, bi = b
    d = br * br + bi * bi
    return ((ar * br + ai * bi) / d, (ai * br - ar * bi) / d)


@lru_cache(maxsize=1 << 16)
def _integrate1(atoms, ci):
    """Formal antiderivative with no added constant."""
    a = _find(atoms, ci)
    if a is None:
        return ((Fraction(1), _replace_atom(atoms, ci, (ci, 1, _F0, NONE, _F0))),)
    _, p, r, code, f = a
    if r == 0 and code == NONE:
        return ((Fraction(1, p + 1), _replace_atom(atoms, ci, (ci, p + 1, r, code, f))),)
    # int x^p e^{zx} dx = e^{zx} sum_j (-1)^j p!/(p-j)! x^{p-j} / z^{j+1}, z = r + i f
    z = (r, f)
    inv = _cdiv((Fraction(1), _F0), z)
    w = inv
    falling = 1
    out = []
    for j in range(p + 1):
        s = -1 if j % 2 else 1
        wr, wi = s * falling * w[0], s * falling * w[1]
        power = p - j
        if code == NONE:
            out.append((wr, (ci, power, r, NONE, _F0)))
        elif code == COS:
            out.append((wr, (ci, power, r, COS, f)))
            out.append((-wi, (ci, power, r, SIN, f)))
        else:
            out.append((wr, (ci, power, r, SIN, f)))
            out.append((wi, (ci, power, r, COS, f)))
        falling *= p - j
        w = (w[0] * inv[0] - w[1] * inv[1], w[0] * inv[1] + w[1] * inv[0])
    acc: dict = {}
    for c, na in out:
        if c == 0:
            continue
        _, na = _normalize_atom(*na)
        key = _replace_atom(atoms, ci, na)
        acc[key] = acc.get(key, 0) + c
    return tuple((c, k) for k, c in acc.items() if c != 0)


# ---------------------------------------------------------------------------


class Expr:
    """Immutable canonical expression.  Build with :func:`parse` or the helpers."""

    __slots__ = ("_items", "_hash")

    def __init__(self, items: Mapping | Iterable = ()):
        if isinstance(items, Mapping):
            items = items.items()
        acc: dict = {}
        for key, c in items:
            acc[key] = acc.get(key, 0) + c
        self._items = tuple(sorted(((k, Fraction(c)) for k, c in acc.items() if c != 0),
                                   key=lambda kc: kc[0]))
        self._hash = None

    # constructors --------------------------------------------------------
    @classmethod
    def constant(cls, c) -> "Expr":
        c = Coefficient.coerce(c)
        return cls({((), c.params): c.value})

    @classmethod
    def var(cls, coord: Coord) -> "Expr":
        ci = coord_index(coord)
        return cls({(((ci, 1, _F0, NONE, _F0),), ()): 1})

    @classmethod
    def atom(cls, atom: Atom) -> "Expr":
        s, a = _normalize_atom(*atom._key())
        return cls({((a,) if a else (), ()): s})

    @classmethod
    def exp(cls, coord: Coord, rate=1) -> "Expr":
        return cls.atom(Atom(coord_name(coord_index(coord)), 0, Fraction(rate)))

    @classmethod
    def trig(cls, kind: str, coord: Coord, freq=1) -> "Expr":
        ci = coord_index(coord)
        s, a = _normalize_atom(ci, 0, _F0, TRIG_NAMES.index(kind), Fraction(freq))
        return cls({((a,) if a else (), ()): s}) if s else cls()

    @classmethod
    def from_terms(cls, terms: Iterable[Term]) -> "Expr":
        out = cls()
        for t in terms:
            e = cls.constant(t.coeff)
            for a in t.atoms:
                e = e * cls.atom(a)
            out = out + e
        return out

    # inspection ----------------------------------------------------------
    @property
    def terms(self) -> list[Term]:
        return [Term(Coefficient(c, params), tuple(_atom_from_tuple(a) for a in atoms))
                for (atoms, params), c in self._items]

    def items(self):
        """Raw ``((atoms, params), value)`` pairs in canonical order."""
        return self._items

    def __len__(self):
        return len(self._items)

    def __iter__(self):
        for item in self._items:
            yield Expr((item,))

    def is_zero(self) -> bool:
        return not self._items

    def coord_indices(self) -> set[int]:
        return {a[0] for (atoms, _), _c in self._items for a in atoms}

    @property
    def coords(self) -> tuple[str, ...]:
        return tuple(coord_name(i) for i in sorted(self.coord_indices()))

    @property
    def params(self) -> tuple[str, ...]:
        return tuple(sorted({n for (_, params), _c in self._items for n, _e in params}))

    def is_polynomial(self) -> bool:
        return all(a[2] == 0 and a[3] == NONE for (atoms, _), _c in self._items for a in atoms)

    def degree(self) -> int:
        """Highest total polynomial degree over all terms (0 for zero)."""
        return max((sum(a[1] for a in atoms) for (atoms, _), _c in self._items), default=0)

    def as_coefficient(self) -> Coefficient | None:
        """The value as a Coefficient when the expression is atom-free and single-term."""
        if not self._items:
            return Coefficient(0)
        if len(self._items) == 1:
            (atoms, params), c = self._items[0]
            if not atoms:
                return Coefficient(c, params)
        return None

    # arithmetic ----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Expr):
            return self._items == other._items
        if isinstance(other, (int, Fraction, Coefficient)):
            return self._items == Expr.constant(other)._items
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._items)
        return self._hash

    def __add__(self, other):
        other = _coerce(other)
        return Expr(self._items + other._items)

    __radd__ = __add__

    def __neg__(self):
        return Expr((k, -c) for k, c in self._items)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Coefficient, str)):
            return self.scale(other)
        if not isinstance(other, Expr):
            return NotImplemented
        acc: dict = {}
        for (a1, p1), c1 in self._items:
            for (a2, p2), c2 in other._items:
                params = mul_params(p1, p2)
                for c, atoms in _mul_atoms(a1, a2):
                    key = (atoms, params)
                    acc[key] = acc.get(key, 0) + c * c1 * c2
        return Expr(acc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Expr):
            c = other.as_coefficient()
            if c is None:
                raise ValueError("can only divide by a constant or parameter monomial")
            other = c
        return self.scale(Coefficient.coerce(other).inverse())

    def __pow__(self, n: int):
        n = int(n)
        if n < 0:
            raise ValueError("negative powers are not in the expression class")
        result = Expr.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c) -> "Expr":
        c = Coefficient.coerce(c)
        if c.value == 0:
            return Expr()
        return Expr(((atoms, mul_params(params, c.params)), v * c.value)
                    for (atoms, params), v in self._items)

    # calculus ------------------------------------------------------------
    def derivative(self, coord: Coord, order: int = 1) -> "Expr":
        if order < 0:
            raise ValueError("derivative order must be non-negative")
        if order == 0:
            return self
        ci = coord_index(coord)
        acc: dict = {}
        for (atoms, params), v in self._items:
            for c, k in _diff(atoms, ci, order):
                key = (k, params)
                acc[key] = acc.get(key, 0) + c * v
        return Expr(acc)

    def antiderivative(self, coord: Coord, order: int = 1) -> "Expr":
        if order < 0:
            raise ValueError("antiderivative order must be non-negative")
        ci = coord_index(coord)
        current = {k: v for k, v in self._items}
        for _ in range(order):
            acc: dict = {}
            for (atoms, params), v in current.items():
                for c, k in _integrate1(atoms, ci):
                    key = (k, params)
                    acc[key] = acc.get(key, 0) + c * v
            current = acc
        return Expr(current)

    # numerics ------------------------------------------------------------
    def eval(self, point: Mapping[Coord, object], param_values: Mapping[str, object] | None = None,
             dps: int = 50):
        """Evaluate at a point; returns an ``mpmath.mpf`` computed at ``dps`` digits."""
        param_values = param_values or {}
        values = {coord_index(k): v for k, v in point.items()}
        with mpmath.workdps(dps):
            xs = {ci: _mpf(v) for ci, v in values.items()}
            ps = {name: _mpf(v) for name, v in param_values.items()}
            total = mpmath.mpf(0)
            for (atoms, params), c in self._items:
                term = _mpf(c)
                for name, e in params:
                    if name not in ps:
                        raise UnboundError(f"parameter {name!r} is not bound")
                    term *= ps[name] ** e
                for ci, p, r, code, f in atoms:
                    if ci not in xs:
                        raise UnboundError(f"coordinate {coord_name(ci)!r} is not bound")
                    x = xs[ci]
                    if p:
                        term *= x ** p
                    if r:
                        term *= mpmath.exp(_mpf(r) * x)
                    if code == COS:
                        term *= mpmath.cos(_mpf(f) * x)
                    elif code == SIN:
                        term *= mpmath.sin(_mpf(f) * x)
                total += term
            return +total

    # rendering -----------------------------------------------------------
    def __str__(self):
        from .formatting import format_expr

        return format_expr(self, "plain")

    def __repr__(self):
        return f"Expr({str(self)!r})"


def _mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def _coerce(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction, Coefficient, str)):
        return Expr.constant(v)
    raise TypeError(f"cannot combine Expr with {type(v).__name__}")


ZERO = Expr()


# functional API ------------------------------------------------------------


def add(a: Expr, b: Expr) -> Expr:
    return a + b


def mul(a: Expr, b: Expr) -> Expr:
    return a * b


def scale(a: Expr, c) -> Expr:
    return a.scale(c)


def derivative(e: Expr, coord: Coord, order: int = 1) -> Expr:
    return e.derivative(coord, order)


def antiderivative(e: Expr, coord: Coord, order: int = 1) -> Expr:
    return e.antiderivative(coord, order)


def equals(a: Expr, b: Expr) -> bool:
    return a == b


def is_zero(e: Expr) -> bool:
    return e.is_zero()


def proportional(a: Expr, b: Expr) -> Coefficient | None:
    """Coefficient ``c`` with ``a == c*b``, or None when no such monomial exists."""
    if b.is_zero():
        raise ValueError("proportional() needs a nonzero denominator")
    if a.is_zero():
        return Coefficient(0)
    (atoms0, params0), v0 = b.items()[0]
    matches = [(p, v) for (atoms, p), v in a.items() if atoms == atoms0]
    if len(matches) != 1:
        return None
    pa, va = matches[0]
    c = Coefficient(va / v0, mul_params(pa, pow_params(params0, -1)))
    return c if b.scale(c) == a else None


def evaluate(e: Expr, point, param_values=None):
    return e.eval(point, param_values)
