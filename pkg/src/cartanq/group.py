"""SU(2,2) elements, the Poincare embedding and the Cartan decomposition.

Group matrices are the g-convention entry matrices ``(u_{mu nu})``.
Pseudo-unitarity ``u g u^dagger = g``, unitarity and the determinant read
the same in either entry convention, so certificates can be checked on the
stored matrix directly.  Group multiplication is :func:`compose`, which
inserts ``g`` between the factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .core import G, TOL, CartanError, Sector, _frozen_array, sector_metric
from .operators import (
    NonBlockDiagonalError,
    Operator,
    SectorOperator,
    block_decompose,
    compose,
    off_diagonal_residual,
    star,
)

I2 = np.eye(2, dtype=complex)
SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class NotInGroupError(CartanError, ValueError):
    """Raised when a matrix fails the SU(2,2) certificates."""


class NotNormalizedError(CartanError, ValueError):
    pass


class NumericallySingularError(CartanError, ArithmeticError):
    pass


def _matrix(u) -> np.ndarray:
    if isinstance(u, GroupElement):
        return u.matrix
    if isinstance(u, Operator):
        return u.entries
    return np.asarray(u, dtype=complex)


def pseudo_unitary_residual(u) -> float:
    m = _matrix(u)
    return float(np.abs(m @ G @ m.conj().T - G).max())


def unitary_residual(u) -> float:
    m = _matrix(u)
    return float(np.abs(m @ m.conj().T - np.eye(m.shape[0])).max())


def det_residual(u) -> float:
    return float(abs(np.linalg.det(_matrix(u)) - 1.0))


def is_pseudo_unitary(u, tol: float = TOL) -> bool:
    return pseudo_unitary_residual(u) < tol


def is_unitary(u, tol: float = TOL) -> bool:
    return unitary_residual(u) < tol


@dataclass(frozen=True, eq=False)
class GroupElement:
    """A 4x4 matrix together with the predicates it was verified against."""

    matrix: np.ndarray
    certified: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen_array(self.matrix, (4, 4)))
        object.__setattr__(self, "certified", frozenset(self.certified))

    @classmethod
    def certify(cls, matrix, tol: float = TOL, det_tol: float | None = None) -> "GroupElement":
        """Check every predicate and record the ones that hold."""
        m = np.asarray(matrix, dtype=complex)
        det_tol = tol if det_tol is None else det_tol
        found = set()
        if pseudo_unitary_residual(m) < tol:
            found.add("pseudo_unitary")
        if det_residual(m) < det_tol:
            found.add("special")
        if unitary_residual(m) < tol:
            found.add("unitary")
        return cls(m, frozenset(found))

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls.certify(np.eye(4))

    @property
    def operator(self) -> Operator:
        return Operator(self.matrix)

    @property
    def in_su22(self) -> bool:
        return {"pseudo_unitary", "special"} <= self.certified

    def recheck(self, tol: float = TOL, det_tol: float | None = None) -> bool:
        fresh = GroupElement.certify(self.matrix, tol, det_tol)
        return self.certified <= fresh.certified

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement.certify(compose(self.operator, other.operator).entries)


@dataclass(frozen=True, eq=False)
class SL2CElement:
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen_array(self.matrix, (2, 2))
        if abs(np.linalg.det(m) - 1) > 1e3 * TOL:
            raise ValueError("SL(2,C) element must have unit determinant")
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True, eq=False)
class SU2Element:
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen_array(self.matrix, (2, 2))
        if abs(np.linalg.det(m) - 1) > 1e3 * TOL or unitary_residual(m) > 1e3 * TOL:
            raise ValueError("SU(2) element must be unitary with unit determinant")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> "SU2Element":
        return cls(I2)


@dataclass(frozen=True, eq=False)
class TranslationMatrix:
    """Hermitian 2x2 matrix W attached to a Minkowskian translation."""

    matrix: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        m = _frozen_array(self.matrix, (2, 2))
        if np.abs(m - m.conj().T).max() > 1e3 * TOL:
            raise ValueError("translation matrix must be Hermitian")
        if self.normalized and np.abs(m @ m - I2).max() > 1e3 * TOL:
            raise NotNormalizedError("normalized translation matrix must satisfy W^2 = I")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_params(cls, w0: float, w, normalized: bool = False) -> "TranslationMatrix":
        """``W = w0 I + w . sigma``; with ``normalized`` the eigenvalues are
        replaced by their signs so that ``W^2 = I``."""
        m = w0 * I2 + sum(float(c) * s for c, s in zip(w, SIGMA))
        if normalized:
            return cls.normalize_matrix(m)
        return cls(m)

    @classmethod
    def normalize_matrix(cls, m) -> "TranslationMatrix":
        vals, vecs = np.linalg.eigh(np.asarray(m, dtype=complex))
        signs = np.where(vals >= 0, 1.0, -1.0)
        return cls((vecs * signs) @ vecs.conj().T, normalized=True)

    @classmethod
    def zero(cls) -> "TranslationMatrix":
        return cls(np.zeros((2, 2)))


@dataclass(frozen=True, eq=False)
class DynFrameMap:
    """The two sector blocks of an element of the dynamical intersection."""

    plus: SectorOperator
    minus: SectorOperator

    def __post_init__(self):
        for s, b in ((Sector.PLUS, self.plus), (Sector.MINUS, self.minus)):
            if b.domain is not s or b.range is not s:
                raise ValueError(f"{s} block must be sector-preserving on {s}")
            if unitary_residual(b.entries) > 1e3 * TOL:
                raise ValueError(f"{s} block is not unitary")

    @classmethod
    def identity(cls) -> "DynFrameMap":
        return cls(SectorOperator.identity(Sector.PLUS), SectorOperator.identity(Sector.MINUS))

    def block(self, s: Sector) -> SectorOperator:
        return self.plus if Sector.parse(s) is Sector.PLUS else self.minus

    def as_group_element(self) -> GroupElement:
        m = np.zeros((4, 4), dtype=complex)
        m[:2, :2] = self.plus.entries
        m[2:, 2:] = self.minus.entries
        return GroupElement.certify(m)

    def distance_from_identity(self) -> float:
        return max(
            float(np.abs(self.block(s).entries - sector_metric(s)).max()) for s in Sector
        )


@dataclass(frozen=True)
class CartanFactors:
    unitary_part: GroupElement
    positive_part: GroupElement


def block_constraint_residuals(u) -> dict:
    """Residuals of the block form of ``u u* = I``.

    Keys ``plus`` and ``minus`` are the two sector-diagonal identities,
    ``offdiag`` the vanishing mixed block and ``offdiag_star`` its
    star-conjugate.
    """
    b = block_decompose(Operator(_matrix(u)))
    gp, gm = sector_metric(Sector.PLUS), sector_metric(Sector.MINUS)
    plus = compose(b.pp, star(b.pp)) + compose(b.pm, star(b.pm))
    minus = compose(b.mm, star(b.mm)) + compose(b.mp, star(b.mp))
    off = compose(b.pp, star(b.mp)) + compose(b.pm, star(b.mm))
    off_star = compose(b.mp, star(b.pp)) + compose(b.mm, star(b.pm))
    return {
        "plus": float(np.abs(plus.entries - gp).max()),
        "minus": float(np.abs(minus.entries - gm).max()),
        "offdiag": float(np.abs(off.entries).max()),
        "offdiag_star": float(np.abs(off_star.entries).max()),
    }


check_block_constraints = block_constraint_residuals


def _hermitian_function(h: np.ndarray, fn, tol: float) -> np.ndarray:
    vals, vecs = np.linalg.eigh(h)
    if vals.min() < tol:
        raise NumericallySingularError(f"eigenvalue {vals.min():.3e} below {tol:.1e}")
    return (vecs * fn(vals)) @ vecs.conj().T


def cartan_decompose(u: GroupElement, tol: float = TOL) -> CartanFactors:
    """Polar factors ``u = U H`` with ``H = sqrt(u^dagger u)``.

    Raises
    ------
    NotInGroupError
        If ``u`` is not certified pseudo-unitary and special.
    NumericallySingularError
        If ``u^dagger u`` has an eigenvalue below ``tol``.
    """
    if not u.in_su22:
        raise NotInGroupError("input is not certified as an SU(2,2) element")
    m = u.matrix
    hh = m.conj().T @ m
    hh = (hh + hh.conj().T) / 2
    h = _hermitian_function(hh, np.sqrt, tol)
    h_inv = _hermitian_function(hh, lambda v: 1 / np.sqrt(v), tol)
    return CartanFactors(
        unitary_part=GroupElement.certify(m @ h_inv, tol),
        positive_part=GroupElement.certify(h, tol),
    )


def poincare_matrix(a: SL2CElement, w: TranslationMatrix) -> GroupElement:
    """Ten-parameter Poincare matrix built from ``a`` and ``W``."""
    am = a.matrix
    ai = np.linalg.inv(am).conj().T
    wm = w.matrix
    p, q = (I2 + 1j * wm) @ ai, (I2 - 1j * wm) @ ai
    m = 0.5 * np.block([[am + p, am - p], [-am + q, -am - q]])
    return GroupElement.certify(m, det_tol=1e3 * TOL)


def lorentz_matrix(a: SL2CElement) -> GroupElement:
    return poincare_matrix(a, TranslationMatrix.zero())


def dyn_matrix(beta: SU2Element, w: TranslationMatrix, tol: float = TOL) -> GroupElement:
    """Element of the dynamical intersection; ``W`` must satisfy ``W^2 = I``."""
    wm = w.matrix
    if np.abs(wm @ wm - I2).max() > tol:
        raise NotNormalizedError("dynamical frames need W^2 = I")
    b = beta.matrix
    m = np.zeros((4, 4), dtype=complex)
    m[:2, :2] = (I2 + 1j * wm) @ b
    m[2:, 2:] = b.conj().T @ (I2 - 1j * wm)
    return GroupElement.certify(m / np.sqrt(2))


def dyn_companion(beta: SU2Element) -> GroupElement:
    """The W-free pattern ``diag(beta, beta^dagger)``."""
    b = beta.matrix
    m = np.zeros((4, 4), dtype=complex)
    m[:2, :2] = b
    m[2:, 2:] = b.conj().T
    return GroupElement.certify(m)


def dyn_restriction(u: GroupElement, tol: float = TOL) -> DynFrameMap:
    """Split a unitary, pseudo-unitary, block-diagonal element into blocks."""
    op = u.operator
    if off_diagonal_residual(op) > tol:
        raise NonBlockDiagonalError("frame element must be block-diagonal")
    if not (is_unitary(u, tol) and is_pseudo_unitary(u, tol)):
        raise NotInGroupError("frame element must be unitary and pseudo-unitary")
    m = u.matrix
    return DynFrameMap(
        SectorOperator.diagonal(Sector.PLUS, m[:2, :2]),
        SectorOperator.diagonal(Sector.MINUS, m[2:, 2:]),
    )


def _su22_algebra_basis() -> tuple:
    basis = []
    for s in SIGMA:
        a = np.zeros((4, 4), dtype=complex)
        a[:2, :2] = 1j * s
        basis.append(a)
        d = np.zeros((4, 4), dtype=complex)
        d[2:, 2:] = 1j * s
        basis.append(d)
    basis.append(1j * np.diag([1.0, 1.0, -1.0, -1.0]).astype(complex))
    for j in range(2):
        for k in range(2):
            for phase in (1.0, 1j):
                x = np.zeros((4, 4), dtype=complex)
                x[j, 2 + k] = phase
                x[2 + k, j] = np.conj(phase)
                basis.append(x)
    for x in basis:
        x.setflags(write=False)
    return tuple(basis)


SU22_ALGEBRA_BASIS = _su22_algebra_basis()


def algebra_element(params) -> np.ndarray:
    """Map of a pseudo-anti-Hermitian, trace-free generator from 15 reals."""
    params = np.asarray(params, dtype=float)
    if params.shape != (15,):
        raise ValueError("expected 15 real parameters")
    return np.tensordot(params, np.array(SU22_ALGEBRA_BASIS), axes=1)


def group_from_params(params) -> GroupElement:
    """Exponentiate the generator built from ``params``."""
    generator = algebra_element(params)
    return GroupElement.certify(Operator.from_map(scipy.linalg.expm(generator)).entries)


def random_su22(seed: int) -> GroupElement:
    """Deterministic random element; 15 uniform parameters in [-1, 1]."""
    rng = np.random.default_rng(seed)
    return group_from_params(rng.uniform(-1.0, 1.0, 15))


def random_sl2c(rng: np.random.Generator) -> SL2CElement:
    x = sum(complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) * s for s in SIGMA)
    return SL2CElement(scipy.linalg.expm(0.5 * x))


def random_su2(rng: np.random.Generator) -> SU2Element:
    x = sum(1j * rng.uniform(-np.pi, np.pi) * s for s in SIGMA)
    return SU2Element(scipy.linalg.expm(0.5 * x))


def random_translation(rng: np.random.Generator, normalized: bool = False) -> TranslationMatrix:
    w0 = rng.uniform(-1, 1)
    w = rng.uniform(-1, 1, 3)
    if normalized:
        # keep |w| > |w0| so the normalized matrix is a unit spatial direction
        w0 = 0.5 * w0 * np.linalg.norm(w)
    return TranslationMatrix.from_params(w0, w, normalized=normalized)


def random_dyn_frame(seed_or_rng) -> DynFrameMap:
    rng = (
        seed_or_rng
        if isinstance(seed_or_rng, np.random.Generator)
        else np.random.default_rng(seed_or_rng)
    )
    beta = random_su2(rng)
    w = random_translation(rng, normalized=True)
    return dyn_restriction(dyn_matrix(beta, w))
