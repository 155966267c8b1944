"""Exact scalars: a rational number times a monomial in formal parameters."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Tuple, Union

ParamKey = Tuple[Tuple[str, int], ...]
Rational = Union[int, Fraction]


def normalize_params(params) -> ParamKey:
    if isinstance(params, Mapping):
        params = params.items()
    acc: dict[str, int] = {}
    for name, e in params:
        acc[name] = acc.get(name, 0) + int(e)
    return tuple(sorted((n, e) for n, e in acc.items() if e != 0))


def mul_params(a: ParamKey, b: ParamKey) -> ParamKey:
    if not a:
        return b
    if not b:
        return a
    acc = dict(a)
    for name, e in b:
        acc[name] = acc.get(name, 0) + e
    return tuple(sorted((n, e) for n, e in acc.items() if e != 0))


def pow_params(a: ParamKey, n: int) -> ParamKey:
    if n == 0:
        return ()
    return tuple((name, e * n) for name, e in a)


@dataclass(frozen=True)
class Coefficient:
    """``value * prod(param ** exponent)`` with exact rational ``value``.

    Zero always has an empty parameter monomial, so equal values compare equal.
    """

    value: Fraction
    params: ParamKey = ()

    def __post_init__(self):
        value = Fraction(self.value)
        object.__setattr__(self, "value", value)
        params = () if value == 0 else normalize_params(self.params)
        object.__setattr__(self, "params", params)

    @classmethod
    def param(cls, name: str, exponent: int = 1) -> "Coefficient":
        return cls(Fraction(1), ((name, exponent),))

    @classmethod
    def coerce(cls, value) -> "Coefficient":
        if isinstance(value, Coefficient):
            return value
        if isinstance(value, str):
            return cls.param(value)
        return cls(Fraction(value))

    @property
    def numerator(self) -> int:
        return self.value.numerator

    @property
    def denominator(self) -> int:
        return self.value.denominator

    @property
    def param_exponents(self) -> dict[str, int]:
        return dict(self.params)

    def is_zero(self) -> bool:
        return self.value == 0

    def is_rational(self) -> bool:
        return not self.params

    def __bool__(self):
        return self.value != 0

    def __neg__(self):
        return Coefficient(-self.value, self.params)

    def __mul__(self, other):
        other = Coefficient.coerce(other)
        return Coefficient(self.value * other.value, mul_params(self.params, other.params))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * Coefficient.coerce(other).inverse()

    def __rtruediv__(self, other):
        return Coefficient.coerce(other) * self.inverse()

    def inverse(self) -> "Coefficient":
        if self.value == 0:
            raise ZeroDivisionError("zero coefficient has no inverse")
        return Coefficient(1 / self.value, pow_params(self.params, -1))

    def __pow__(self, n: int) -> "Coefficient":
        n = int(n)
        if n < 0:
            return self.inverse() ** (-n)
        return Coefficient(self.value ** n, pow_params(self.params, n))

    def evaluate(self, param_values: Mapping[str, Rational]) -> Fraction:
        out = self.value
        for name, e in self.params:
            if name not in param_values:
                from .errors import UnboundError

                raise UnboundError(f"parameter {name!r} is not bound")
            out *= Fraction(param_values[name]) ** e
        return out

    def __str__(self):
        from .formatting import format_coefficient

        return format_coefficient(self)

    def __repr__(self):
        return f"Coefficient({self})"


ZERO = Coefficient(0)
ONE = Coefficient(1)
