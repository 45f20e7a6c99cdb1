"""Selective measurements on one sector: states, devices and sequences.

A system lives on ``C+`` or ``C-``; its state is a normalized sector bra
``<s| = S^0 <e_0| + S^1 <e_1|``.  Devices are sector operators stored by
their g-convention entries (see :mod:`cartanq.operators`).  Sequences are
read left to right, the same order in which bras pass through them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import TOL, CartanError, Sector, SectorMismatchError, SectorVector, sector_metric
from .operators import (
    SectorOperator,
    compose,
    dyad,
    max_residual,
    sector_trace,
    star,
)


class NotNormalizedError(CartanError, ValueError):
    """State amplitudes do not have unit norm."""


class ZeroBranchError(CartanError, ValueError):
    """An amplitude that must be divided by is (numerically) zero."""


class DegenerateSpectrumError(CartanError, ValueError):
    """Observable eigenvalues coincide."""


class EmptySequenceError(CartanError, ValueError):
    """A device sequence with no devices has no defined product."""


def _g_inner(x: np.ndarray, y: np.ndarray, s: Sector) -> complex:
    return complex(s.sign * np.dot(x, np.conj(y)))


@dataclass(frozen=True, eq=False)
class State:
    vector: SectorVector
    label: str = ""

    @property
    def sector(self) -> Sector:
        return self.vector.sector

    @property
    def amplitudes(self) -> np.ndarray:
        return self.vector.components

    def branch(self, mu: int) -> SectorVector:
        """The reduced bra ``S^mu <e_mu|`` as a plain sector vector."""
        comps = np.zeros(2, dtype=complex)
        comps[mu] = self.amplitudes[mu]
        return SectorVector(self.sector, comps)


@dataclass(frozen=True, eq=False)
class ReducedState:
    vector: SectorVector
    branch: int
    source: str = ""

    @property
    def sector(self) -> Sector:
        return self.vector.sector

    @property
    def amplitude(self) -> complex:
        return complex(self.vector.components[self.branch])


@dataclass(frozen=True)
class Observable:
    """Sector observable with a twofold non-degenerate real spectrum."""

    sector: Sector
    spectrum: tuple

    def __post_init__(self):
        object.__setattr__(self, "sector", Sector.parse(self.sector))
        s0, s1 = (float(v) for v in self.spectrum)
        if abs(s0 - s1) <= TOL:
            raise DegenerateSpectrumError(f"spectrum ({s0}, {s1}) is degenerate")
        object.__setattr__(self, "spectrum", (s0, s1))

    @property
    def operator(self) -> SectorOperator:
        """g-convention matrix ``diag(+-s0, +-s1)``."""
        return SectorOperator.from_map(self.sector, np.diag(self.spectrum))


class DeviceKind(enum.Enum):
    PI = "pi"
    EXCHANGE = "exchange"
    BIG_PI = "Pi"
    M = "M"


@dataclass(frozen=True, eq=False)
class MeasurementDevice:
    """A realized measurement operator plus the data it was built from.

    Dyadic devices (``BIG_PI`` and ``M``) equal ``sign * |ket><bra|``; the
    pieces are kept so that sequences can be checked in closed form.
    """

    kind: DeviceKind
    realized: SectorOperator
    branch: int
    target: Optional[int] = None
    ket: Optional[SectorVector] = None
    bra: Optional[SectorVector] = None
    label: str = ""

    @property
    def sector(self) -> Sector:
        return self.realized.sector

    @property
    def is_dyadic(self) -> bool:
        return self.kind in (DeviceKind.BIG_PI, DeviceKind.M)

    @property
    def sign(self) -> int:
        return self.sector.sign


@dataclass(frozen=True, eq=False)
class DensityOperator:
    op: SectorOperator


def make_state(components, sector, label: str = "", tol: float = TOL) -> State:
    """Validated normalized state.

    Raises
    ------
    NotNormalizedError
        If ``|S^0|^2 + |S^1|^2`` differs from one by more than ``tol``.
    """
    v = SectorVector(sector, components)
    norm = float(np.sum(np.abs(v.components) ** 2))
    if abs(norm - 1.0) > tol:
        raise NotNormalizedError(f"state {label!r} has squared norm {norm:.12g}")
    return State(v, label)


def _identity_metric_map(s: Sector) -> SectorOperator:
    # the metric g as an operator: its map is g, so its g-entries are I
    return SectorOperator.from_map(s, sector_metric(s))


def density(s: State) -> DensityOperator:
    """``rho = g |s><s|`` as an operator on the state's sector."""
    d = dyad(s.vector, s.vector)
    return DensityOperator(compose(d, _identity_metric_map(s.sector)))


def _check_sector(a, b) -> None:
    if a.sector is not b.sector:
        raise SectorMismatchError(f"{a.sector} object combined with {b.sector} object")


def expectation(obs: Observable, s: State) -> float:
    """Spectrum weighted by Born probabilities."""
    _check_sector(obs, s)
    return float(np.dot(obs.spectrum, np.abs(s.amplitudes) ** 2))


def expectation_trace(obs: Observable, s: State) -> complex:
    """The same value computed as ``Tr(rho S)``."""
    _check_sector(obs, s)
    return sector_trace(compose(density(s).op, obs.operator))


def pi_device(sector, branch: int) -> MeasurementDevice:
    """Canonical branch selector ``pi_(mu)``; its map projects on ``e_mu``."""
    sector = Sector.parse(sector)
    m = np.zeros((2, 2), dtype=complex)
    m[branch, branch] = 1.0
    return MeasurementDevice(
        DeviceKind.PI, SectorOperator.from_map(sector, m), branch, label=f"pi{branch}"
    )


def apply_pi(s: State, branch: int) -> ReducedState:
    dev = pi_device(s.sector, branch)
    return ReducedState(dev.realized.bra_apply(s.vector), branch, s.label)


def apply_device(v: SectorVector, d: MeasurementDevice) -> SectorVector:
    return d.realized.bra_apply(v)


def born(s: State, branch: int) -> float:
    """``<s| pi g || s>_g``, which reduces to ``|S^mu|^2``."""
    pi = pi_device(s.sector, branch).realized
    moved = compose(pi, _identity_metric_map(s.sector)).bra_apply(s.vector)
    return float(_g_inner(moved.components, s.amplitudes, s.sector).real)


def renormalize(r: ReducedState, tol: float = TOL) -> State:
    amp = r.amplitude
    if abs(amp) <= tol:
        raise ZeroBranchError(f"branch {r.branch} of {r.source!r} is empty")
    return State(SectorVector(r.sector, r.vector.components / abs(amp)), r.source)


def exchange_device(s: State, source: int, target: int, tol: float = TOL) -> MeasurementDevice:
    """State-adapted device sending ``<s_(source)|`` to ``<s_(target)|``."""
    if source == target:
        raise ValueError("exchange needs two distinct branches")
    amps = s.amplitudes
    if min(abs(amps[0]), abs(amps[1])) <= tol:
        raise ZeroBranchError(f"state {s.label!r} has an empty branch")
    m = np.zeros((2, 2), dtype=complex)
    m[source, target] = amps[target] / amps[source]
    return MeasurementDevice(
        DeviceKind.EXCHANGE,
        SectorOperator.from_map(s.sector, m),
        source,
        target=target,
        label=f"x{source}{target}({s.label})",
    )


def big_pi(s: State, branch: int) -> MeasurementDevice:
    """``+-|s_(mu)><s_(mu)|``."""
    b = s.branch(branch)
    op = dyad(b, b) * s.sector.sign
    return MeasurementDevice(
        DeviceKind.BIG_PI, op, branch, ket=b, bra=b, label=f"Pi{branch}({s.label})"
    )


def m_device(a: State, c: State, branch: int) -> MeasurementDevice:
    """``+-|a_(mu)><c_(mu)|``, which carries ``a`` in and ``c`` out."""
    _check_sector(a, c)
    ka, bc = a.branch(branch), c.branch(branch)
    op = dyad(ka, bc) * a.sector.sign
    return MeasurementDevice(
        DeviceKind.M, op, branch, ket=ka, bra=bc, label=f"M{branch}({a.label},{c.label})"
    )


def pairing(x: SectorVector, d: MeasurementDevice, y: SectorVector) -> complex:
    """``<x| D || y>_g``: bra action followed by the sector product."""
    moved = d.realized.bra_apply(x)
    return _g_inner(moved.components, y.components, x.sector)


def ket_pairing(x: SectorVector, op: SectorOperator, y: SectorVector) -> complex:
    """``<x|| X | y>_g``, with ``X`` acting on the ket ``|y>``.

    The ket action of ``X`` is the bra action of ``X*``; this keeps the
    sandwich associative.
    """
    moved = star(op).bra_apply(y)
    return _g_inner(x.components, moved.components, x.sector)


def star_interchange_residual(s: State, source: int, target: int) -> float:
    """Distance between ``<s_(source)|X||s_(target)>`` and ``<s_(target)||X*|s_(source)>``."""
    d = exchange_device(s, source, target)
    lhs = pairing(s.branch(source), d, s.branch(target))
    rhs = ket_pairing(s.branch(target), star(d.realized), s.branch(source))
    return abs(lhs - rhs)


@dataclass(frozen=True, eq=False)
class SequenceResult:
    """Product of a device sequence with its closed-form pieces.

    ``weights`` are the scalar products linking consecutive dyads,
    ``<y_k Mid_k | x_{k+1}>_g``.  When the sequence contains a dyad, the
    product equals ``coefficient * |head><tail|``.
    """

    operator: SectorOperator
    weights: tuple = ()
    coefficient: Optional[complex] = None
    head: Optional[SectorVector] = None
    tail: Optional[SectorVector] = None
    closed_form: Optional[SectorOperator] = None

    @property
    def transmission(self) -> complex:
        return complex(np.prod(self.weights)) if self.weights else 1.0 + 0j

    @property
    def closed_form_residual(self) -> Optional[float]:
        if self.closed_form is None:
            return None
        return max_residual(self.operator, self.closed_form)

    @property
    def trace(self) -> complex:
        return sector_trace(self.operator)


def compose_sequence(devices: Sequence[MeasurementDevice]) -> SequenceResult:
    """Multiply devices left to right and extract the transmission weights.

    Raises
    ------
    EmptySequenceError
        For an empty list.
    SectorMismatchError
        If devices live on different sectors.
    """
    devices = list(devices)
    if not devices:
        raise EmptySequenceError("cannot compose an empty device sequence")
    sector = devices[0].sector
    for d in devices[1:]:
        if d.sector is not sector:
            raise SectorMismatchError("all devices in a sequence must share one sector")

    product = devices[0].realized
    for d in devices[1:]:
        product = compose(product, d.realized)

    ident = SectorOperator.identity(sector)
    pending = ident
    head = tail = None
    sign = 1
    weights = []
    for d in devices:
        if not d.is_dyadic:
            pending = compose(pending, d.realized)
            continue
        sign *= d.sign
        if head is None:
            head = star(pending).bra_apply(d.ket)
        else:
            w = pending.bra_apply(tail)
            weights.append(_g_inner(w.components, d.ket.components, sector))
        tail = d.bra
        pending = ident
    if head is None:
        return SequenceResult(product)
    tail = pending.bra_apply(tail)
    coefficient = sign * complex(np.prod(weights)) if weights else complex(sign)
    closed = dyad(head, tail) * coefficient
    return SequenceResult(product, tuple(weights), coefficient, head, tail, closed)


def sequence_trace(devices: Sequence[MeasurementDevice]) -> complex:
    return compose_sequence(devices).trace
