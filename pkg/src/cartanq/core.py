"""Vectors of Cartan's space C^4 and its fundamental decomposition.

Components are stored as complex numpy arrays.  The indefinite metric is
``g = diag(1, 1, -1, -1)``; the positive sector holds components 0 and 1,
the negative sector components 2 and 3.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

TOL = 1e-10

G = np.diag([1.0, 1.0, -1.0, -1.0]).astype(complex)
DELTA = np.eye(4, dtype=complex)


class CartanError(Exception):
    """Base class for errors raised by this package."""


class SectorMismatchError(CartanError, ValueError):
    """Raised when objects living on different sectors are combined."""


class Sector(enum.Enum):
    PLUS = "+"
    MINUS = "-"

    @property
    def sign(self) -> int:
        return 1 if self is Sector.PLUS else -1

    @property
    def indices(self) -> slice:
        return slice(0, 2) if self is Sector.PLUS else slice(2, 4)

    @property
    def other(self) -> "Sector":
        return Sector.MINUS if self is Sector.PLUS else Sector.PLUS

    @classmethod
    def parse(cls, value) -> "Sector":
        if value.__class__ is cls:
            return value
        text = str(value).strip().lower()
        if text in ("+", "plus", "p"):
            return cls.PLUS
        if text in ("-", "minus", "m"):
            return cls.MINUS
        raise ValueError(f"unknown sector {value!r}")

    def __str__(self) -> str:
        return self.value


def _frozen_array(values, shape) -> np.ndarray:
    arr = np.array(values, dtype=complex).reshape(shape)
    # a single reduction; any inf or nan makes the sum non-finite
    if not np.isfinite(arr.sum()):
        raise ValueError("components must be finite")
    arr.setflags(write=False)
    return arr


def _read_only(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


_SECTOR_METRICS = {
    Sector.PLUS: _read_only(np.eye(2, dtype=complex)),
    Sector.MINUS: _read_only(-np.eye(2, dtype=complex)),
}


def sector_metric(s: Sector) -> np.ndarray:
    """Reduced metric g^{+-}: ``+I2`` or ``-I2``.

    The adjoint metric g*_{+-} has the same entries, so this doubles as it.
    The returned array is shared and read-only.
    """
    return _SECTOR_METRICS[s]


def metric(kind: str = "g") -> np.ndarray:
    """The 4x4 metric matrix, ``"g"`` (indefinite) or ``"delta"`` (Hilbert)."""
    if kind == "g":
        return G.copy()
    if kind == "delta":
        return DELTA.copy()
    raise ValueError(f"unknown metric kind {kind!r}")


@dataclass(frozen=True, eq=False)
class CartanVector:
    """Bra ``<x| = x^mu <e_mu|`` of C^4."""

    components: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "components", _frozen_array(self.components, (4,)))

    @classmethod
    def basis(cls, mu: int) -> "CartanVector":
        comps = np.zeros(4, dtype=complex)
        comps[mu] = 1.0
        return cls(comps)

    def __add__(self, other: "CartanVector") -> "CartanVector":
        return CartanVector(self.components + other.components)

    def __sub__(self, other: "CartanVector") -> "CartanVector":
        return CartanVector(self.components - other.components)

    def __mul__(self, scalar) -> "CartanVector":
        return CartanVector(self.components * scalar)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, CartanVector):
            return NotImplemented
        return bool(np.array_equal(self.components, other.components))

    def __repr__(self) -> str:
        return f"CartanVector({self.components.tolist()})"


@dataclass(frozen=True, eq=False)
class SectorVector:
    """Element of C^+ or C^- with its two live components."""

    sector: Sector
    components: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "sector", Sector.parse(self.sector))
        object.__setattr__(self, "components", _frozen_array(self.components, (2,)))

    def _check(self, other: "SectorVector") -> None:
        if other.sector is not self.sector:
            raise SectorMismatchError(f"sector {self.sector} vs {other.sector}")

    def __add__(self, other: "SectorVector") -> "SectorVector":
        self._check(other)
        return SectorVector(self.sector, self.components + other.components)

    def __sub__(self, other: "SectorVector") -> "SectorVector":
        self._check(other)
        return SectorVector(self.sector, self.components - other.components)

    def __mul__(self, scalar) -> "SectorVector":
        return SectorVector(self.sector, self.components * scalar)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, SectorVector):
            return NotImplemented
        return self.sector is other.sector and bool(
            np.array_equal(self.components, other.components)
        )

    def __repr__(self) -> str:
        return f"SectorVector({self.sector}, {self.components.tolist()})"


def hilbert_inner(x: CartanVector, y: CartanVector) -> complex:
    """Positive-definite product ``<<x|y>> = x^mu conj(y^mu)``."""
    return complex(np.dot(x.components, np.conj(y.components)))


def indefinite_inner(x: CartanVector, y: CartanVector) -> complex:
    """Indefinite product ``<x|y>_g = x^mu g_{mu nu} conj(y^nu)``."""
    return complex(x.components @ G @ np.conj(y.components))


def apply_metric(x: CartanVector) -> CartanVector:
    return CartanVector(np.diag(G) * x.components)


def project(x: CartanVector, s: Sector) -> SectorVector:
    s = Sector.parse(s)
    return SectorVector(s, x.components[s.indices])


def embed(v: SectorVector) -> CartanVector:
    comps = np.zeros(4, dtype=complex)
    comps[v.sector.indices] = v.components
    return CartanVector(comps)


def sector_inner(x: SectorVector, y: SectorVector) -> complex:
    """Definite product on one sector: ``x^mu g^{+-}_{mu nu} conj(y^nu)``.

    Raises
    ------
    SectorMismatchError
        If ``x`` and ``y`` are on different sectors.
    """
    x._check(y)
    return complex(x.sector.sign * np.dot(x.components, np.conj(y.components)))


def hilbert_sector_inner(x: SectorVector, y: SectorVector) -> complex:
    x._check(y)
    return complex(np.dot(x.components, np.conj(y.components)))


def adjoint_components(x: SectorVector) -> np.ndarray:
    """Lowered components ``x_mu = x^lambda g_{lambda mu}``."""
    return x.sector.sign * x.components


def raise_components(lowered, s: Sector) -> SectorVector:
    """Inverse of :func:`adjoint_components` (contracts with g*)."""
    s = Sector.parse(s)
    return SectorVector(s, s.sign * np.asarray(lowered, dtype=complex))


def adjoint_sector_inner(x_low, y_low, s: Sector) -> complex:
    """Product of two adjoint-space elements given by lowered components."""
    s = Sector.parse(s)
    return complex(np.asarray(x_low) @ sector_metric(s) @ np.conj(np.asarray(y_low)))
