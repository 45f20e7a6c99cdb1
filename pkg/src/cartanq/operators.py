"""Operators on Cartan's space and their sector restrictions.

Every operator stores its *g-convention* entries
``A_{mu nu} = <e_mu| A || e_nu>_g``.  The ordinary matrix of the linear
map (the Hilbert or Delta-convention entries ``a_{mu nu}``) is recovered as
``a = A g``.  Bras are row vectors and act on operators from the left, so
``<x| A`` has components ``x @ a``.

Sector operators carry a ``(domain, range)`` pair.  Rows of the entry
matrix are labelled by the domain sector and columns by the range sector,
matching the block scheme ``A^{+-}: C^+ -> C^-``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    G,
    TOL,
    CartanError,
    CartanVector,
    Sector,
    SectorMismatchError,
    SectorVector,
    _frozen_array,
    sector_metric,
)


class NonBlockDiagonalError(CartanError, ValueError):
    """Raised when a sector-preserving operator was required."""


@dataclass(frozen=True, eq=False)
class Operator:
    """4x4 operator on C^4 stored by its g-convention entries."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen_array(self.entries, (4, 4)))

    @classmethod
    def from_map(cls, matrix) -> "Operator":
        """Build from the plain (Delta-convention) matrix of the map."""
        return cls(np.asarray(matrix, dtype=complex) @ G)

    @classmethod
    def identity(cls) -> "Operator":
        return cls.from_map(np.eye(4))

    @property
    def delta(self) -> np.ndarray:
        """Delta-convention entries ``a = A g``."""
        return self.entries @ G

    def apply(self, x: CartanVector) -> CartanVector:
        """Column action ``a x`` of the underlying map."""
        return CartanVector(self.delta @ x.components)

    def bra_apply(self, x: CartanVector) -> CartanVector:
        """Right action on a bra, ``<x| A``."""
        return CartanVector(x.components @ self.delta)

    def __matmul__(self, other: "Operator") -> "Operator":
        return compose(self, other)

    def __add__(self, other: "Operator") -> "Operator":
        return Operator(self.entries + other.entries)

    def __sub__(self, other: "Operator") -> "Operator":
        return Operator(self.entries - other.entries)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.entries * scalar)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Operator({np.round(self.entries, 12).tolist()})"


@dataclass(frozen=True, eq=False)
class SectorOperator:
    """2x2 block acting from ``domain`` into ``range``; g-convention entries."""

    domain: Sector
    range: Sector
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "domain", Sector.parse(self.domain))
        object.__setattr__(self, "range", Sector.parse(self.range))
        object.__setattr__(self, "entries", _frozen_array(self.entries, (2, 2)))

    @classmethod
    def diagonal(cls, s: Sector, entries) -> "SectorOperator":
        return cls(s, s, entries)

    @classmethod
    def from_map(cls, s: Sector, matrix) -> "SectorOperator":
        """Sector-preserving operator from its plain map matrix."""
        s = Sector.parse(s)
        return cls(s, s, np.asarray(matrix, dtype=complex) @ sector_metric(s))

    @classmethod
    def identity(cls, s: Sector) -> "SectorOperator":
        return cls.from_map(s, np.eye(2))

    @property
    def is_diagonal(self) -> bool:
        return self.domain is self.range

    @property
    def sector(self) -> Sector:
        self._require_diagonal()
        return self.domain

    @property
    def delta(self) -> np.ndarray:
        return self.entries @ sector_metric(self.range)

    def _require_diagonal(self) -> None:
        if not self.is_diagonal:
            raise SectorMismatchError(
                f"operator maps {self.domain} -> {self.range}; a sector-preserving one is required"
            )

    def bra_apply(self, x: SectorVector) -> SectorVector:
        """``<x| A`` for ``x`` in the domain sector."""
        if x.sector is not self.domain:
            raise SectorMismatchError(f"bra on {x.sector}, operator domain {self.domain}")
        return SectorVector(self.range, x.components @ self.delta)

    def __matmul__(self, other: "SectorOperator") -> "SectorOperator":
        return compose(self, other)

    def __add__(self, other: "SectorOperator") -> "SectorOperator":
        self._same_shape(other)
        return SectorOperator(self.domain, self.range, self.entries + other.entries)

    def __sub__(self, other: "SectorOperator") -> "SectorOperator":
        self._same_shape(other)
        return SectorOperator(self.domain, self.range, self.entries - other.entries)

    def __mul__(self, scalar) -> "SectorOperator":
        return SectorOperator(self.domain, self.range, self.entries * scalar)

    __rmul__ = __mul__

    def _same_shape(self, other: "SectorOperator") -> None:
        if (self.domain, self.range) != (other.domain, other.range):
            raise SectorMismatchError("sector operators live on different blocks")

    def __repr__(self) -> str:
        return (
            f"SectorOperator({self.domain}->{self.range}, "
            f"{np.round(self.entries, 12).tolist()})"
        )


@dataclass(frozen=True)
class BlockDecomposition:
    pp: SectorOperator
    pm: SectorOperator
    mp: SectorOperator
    mm: SectorOperator

    def block(self, domain: Sector, range_: Sector) -> SectorOperator:
        key = (Sector.parse(domain), Sector.parse(range_))
        return {
            (Sector.PLUS, Sector.PLUS): self.pp,
            (Sector.PLUS, Sector.MINUS): self.pm,
            (Sector.MINUS, Sector.PLUS): self.mp,
            (Sector.MINUS, Sector.MINUS): self.mm,
        }[key]

    def reassemble(self) -> Operator:
        return Operator(
            np.block(
                [[self.pp.entries, self.pm.entries], [self.mp.entries, self.mm.entries]]
            )
        )


def compose(a, b):
    """Operator product ``AB`` with the adjoint metric inserted between factors.

    For 4x4 operators the entries multiply as ``A g* B``; for sector blocks the
    contracted index runs over ``a.range`` and ``g*`` of that sector is used.
    """
    if isinstance(a, Operator) and isinstance(b, Operator):
        return Operator(a.entries @ G @ b.entries)
    if isinstance(a, SectorOperator) and isinstance(b, SectorOperator):
        if a.range is not b.domain:
            raise SectorMismatchError(f"cannot compose {a.range} range with {b.domain} domain")
        return SectorOperator(a.domain, b.range, a.entries @ sector_metric(a.range) @ b.entries)
    raise TypeError("compose expects two Operators or two SectorOperators")


def dagger(a):
    """Hermitian conjugate: conjugate transpose of the Delta-convention matrix."""
    if isinstance(a, Operator):
        return Operator.from_map(a.delta.conj().T)
    if isinstance(a, SectorOperator):
        d = a.delta.conj().T
        return SectorOperator(a.range, a.domain, d @ sector_metric(a.domain))
    raise TypeError(f"cannot take dagger of {type(a).__name__}")


def star(a):
    """Pseudo-Hermitian conjugate; its g-entries are ``conj(A^T)``."""
    if isinstance(a, Operator):
        return Operator(a.entries.conj().T)
    if isinstance(a, SectorOperator):
        return SectorOperator(a.range, a.domain, a.entries.conj().T)
    raise TypeError(f"cannot take star of {type(a).__name__}")


def projector(s: Sector) -> Operator:
    """P^+ or P^- as a 4x4 operator."""
    s = Sector.parse(s)
    m = np.zeros((4, 4), dtype=complex)
    m[s.indices, s.indices] = np.eye(2)
    return Operator.from_map(m)


def block_decompose(a: Operator) -> BlockDecomposition:
    e = a.entries
    p, m = Sector.PLUS, Sector.MINUS
    return BlockDecomposition(
        pp=SectorOperator(p, p, e[:2, :2]),
        pm=SectorOperator(p, m, e[:2, 2:]),
        mp=SectorOperator(m, p, e[2:, :2]),
        mm=SectorOperator(m, m, e[2:, 2:]),
    )


def off_diagonal_residual(a: Operator) -> float:
    e = a.entries
    return float(max(np.abs(e[:2, 2:]).max(), np.abs(e[2:, :2]).max()))


def restrict(a: Operator, s: Sector, tol: float = TOL) -> SectorOperator:
    """Restriction ``Res A`` on one sector.

    Raises
    ------
    NonBlockDiagonalError
        If either off-diagonal block exceeds ``tol`` in max norm.
    """
    s = Sector.parse(s)
    r = off_diagonal_residual(a)
    if r > tol:
        raise NonBlockDiagonalError(f"off-diagonal block of size {r:.3e} exceeds tol {tol:.1e}")
    return SectorOperator(s, s, a.entries[s.indices, s.indices])


def adjoint_representation(a: SectorOperator) -> np.ndarray:
    """Adjoint-space entries ``A*^{mu nu} = g* A g*``."""
    gs = sector_metric(a.sector)
    return gs @ a.entries @ gs


def from_adjoint_representation(adj, s: Sector) -> SectorOperator:
    s = Sector.parse(s)
    gs = sector_metric(s)
    return SectorOperator(s, s, gs @ np.asarray(adj, dtype=complex) @ gs)


def trace(a: Operator) -> complex:
    """``A_00 + A_11 - A_22 - A_33``."""
    return complex(np.sum(np.diag(a.entries) * np.diag(G)))


def sector_trace(a: SectorOperator) -> complex:
    """Restricted trace ``A_{mu lambda} g*^{lambda mu}``."""
    return complex(np.trace(a.entries @ sector_metric(a.sector)))


def dyad(ket: SectorVector, bra: SectorVector) -> SectorOperator:
    """The operator ``|x><y|``, acting on bras as ``<v| -> <v|x>_g <y|``."""
    if ket.sector is not bra.sector:
        raise SectorMismatchError("dyad factors must share a sector")
    s = ket.sector
    gs = sector_metric(s)
    m = np.outer(gs @ np.conj(ket.components), bra.components)
    return SectorOperator(s, s, m @ gs)


def is_pseudo_hermitian(a, tol: float = TOL) -> bool:
    return bool(np.abs(star(a).entries - a.entries).max() < tol)


def is_hermitian(a, tol: float = TOL) -> bool:
    return bool(np.abs(dagger(a).entries - a.entries).max() < tol)


def max_residual(a, b) -> float:
    """Max-norm distance between two operators or arrays."""
    ea = a.entries if hasattr(a, "entries") else np.asarray(a)
    eb = b.entries if hasattr(b, "entries") else np.asarray(b)
    return float(np.abs(ea - eb).max())
