"""Helmholtz decomposition of vector fields through a potential matrix.

Solve ``Delta phi_i = f_i`` componentwise, take ``F_ij = d_j phi_i``, then
``G = trace F``, ``R = F - F^T``, ``g = grad G`` and ``r_i = sum_k d_k R_ik``.
The result is one decomposition among many: adding a harmonic field to
``phi`` gives another valid one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import UnsupportedError, VerificationError
from .expr import Expr, spatial_coords
from .solver import solve_poisson


@dataclass(frozen=True)
class VectorField:
    components: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        n = len(self.components)
        for c in self.components:
            if any(i == 0 or i > n for i in c.coord_indices()):
                raise ValueError(f"component {c} uses coordinates outside x1..x{n}")

    @property
    def n(self) -> int:
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(tuple(a + b for a, b in zip(self, other)))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)


@dataclass(frozen=True)
class PotentialMatrix:
    entries: tuple[tuple[Expr, ...], ...]

    def __post_init__(self):
        entries = tuple(tuple(row) for row in self.entries)
        if any(len(row) != len(entries) for row in entries):
            raise ValueError("potential matrix must be square")
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def transpose(self) -> "PotentialMatrix":
        n = self.n
        return PotentialMatrix(tuple(tuple(self.entries[j][i] for j in range(n)) for i in range(n)))

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)


def _coords(n):
    return spatial_coords(n)


def divergence(v: VectorField) -> Expr:
    xs = _coords(v.n)
    return Expr([item for i, c in enumerate(v) for item in c.derivative(xs[i]).items()])


def gradient(G: Expr, n: int) -> VectorField:
    return VectorField(tuple(G.derivative(x) for x in _coords(n)))


def jacobian(v: VectorField) -> PotentialMatrix:
    """``J_ij = d_j v_i``."""
    xs = _coords(v.n)
    return PotentialMatrix(tuple(tuple(c.derivative(x) for x in xs) for c in v))


def solve_vector_poisson(f: VectorField) -> VectorField:
    """``phi`` with ``Delta phi_i = f_i`` for every component."""
    out = []
    for i, comp in enumerate(f):
        try:
            out.append(solve_poisson(comp, n=f.n))
        except UnsupportedError as exc:
            raise UnsupportedError(f"component {i + 1}: {exc}") from exc
    return VectorField(tuple(out))


@dataclass(frozen=True)
class Potentials:
    F: PotentialMatrix
    G: Expr
    R: PotentialMatrix


def build_potentials(phi: VectorField) -> Potentials:
    F = jacobian(phi)
    n = F.n
    G = Expr([item for k in range(n) for item in F[k, k].items()])
    R = PotentialMatrix(tuple(tuple(F[i, k] - F[k, i] for k in range(n)) for i in range(n)))
    return Potentials(F, G, R)


def fields(F: PotentialMatrix) -> tuple[VectorField, VectorField]:
    """Gradient field ``g`` and rotation field ``r`` of an arbitrary potential matrix."""
    n = F.n
    xs = _coords(n)
    G = Expr([item for k in range(n) for item in F[k, k].items()])
    g = gradient(G, n)
    r = VectorField(tuple(
        Expr([item for k in range(n) for item in (F[i, k] - F[k, i]).derivative(xs[k]).items()])
        for i in range(n)))
    return g, r


def is_gradient_certified(g: VectorField) -> bool:
    """Symmetric Jacobian, i.e. ``d_i g_j == d_j g_i`` for all pairs."""
    J = jacobian(g)
    return J == J.transpose()


@dataclass(frozen=True)
class Decomposition:
    f: VectorField
    phi: VectorField
    F: PotentialMatrix
    G: Expr
    R: PotentialMatrix
    g: VectorField
    r: VectorField


def decompose(f: VectorField | Sequence[Expr]) -> Decomposition:
    """Split ``f`` into a gradient field ``g`` and a divergence-free field ``r``.

    Reconstruction, solenoidality and the gradient certificate are checked
    exactly; a failure raises :class:`VerificationError`.
    """
    if not isinstance(f, VectorField):
        f = VectorField(tuple(f))
    phi = solve_vector_poisson(f)
    pot = build_potentials(phi)
    g, r = fields(pot.F)
    if g + r != f:
        raise VerificationError("g + r does not reconstruct f")
    div_r = divergence(r)
    if not div_r.is_zero():
        raise VerificationError("rotation field is not divergence-free", div_r)
    if not is_gradient_certified(g):
        raise VerificationError("gradient field has a non-symmetric Jacobian")
    return Decomposition(f, phi, pot.F, pot.G, pot.R, g, r)
