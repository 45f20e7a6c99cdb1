"""Transport between frames related by an element of the dynamical intersection.

A frame map supplies a unitary, pseudo-unitary block ``u`` per sector (its
g-convention entries).  The primed basis bras are ``<e'_mu| = <e_mu| u``,
so in components they are the rows of ``u g``.  Everything that follows
from that choice:

* primed amplitudes ``S' = S u^dagger g`` (so that ``S' (u g) = S``);
* the primed matrix of a fixed operator ``X`` is ``u g X g u^dagger``;
* a primed matrix ``X'`` maps back to ``g u^dagger X' u g``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import TOL, Sector, SectorMismatchError, SectorVector, sector_metric
from .group import DynFrameMap
from .measurement import (
    MeasurementDevice,
    Observable,
    State,
    ZeroBranchError,
    big_pi,
    born,
    exchange_device,
    m_device,
    pairing,
    pi_device,
)
from .operators import SectorOperator, compose, dyad, max_residual, sector_trace, star


class TransformPolicy(enum.Enum):
    """How an observable is carried into the primed frame.

    ``FIXED_OPERATOR`` keeps the abstract operator and re-expresses its
    matrix; ``FIXED_MATRIX`` keeps the matrix entries, which defines a new
    operator ``u* S u``.
    """

    FIXED_OPERATOR = "fixed-operator"
    FIXED_MATRIX = "fixed-matrix"


@dataclass(frozen=True, eq=False)
class FrameTransform:
    map: DynFrameMap
    label: str = ""

    @classmethod
    def identity(cls) -> "FrameTransform":
        return cls(DynFrameMap.identity(), "identity")

    def u(self, s: Sector) -> np.ndarray:
        return self.map.block(s).entries

    def distance_from_identity(self, s: Optional[Sector] = None) -> float:
        if s is None:
            return self.map.distance_from_identity()
        s = Sector.parse(s)
        return float(np.abs(self.u(s) - sector_metric(s)).max())


def primed_basis(f: FrameTransform, s: Sector) -> np.ndarray:
    """Rows are the components of ``<e'_0|`` and ``<e'_1|``."""
    s = Sector.parse(s)
    return f.u(s) @ sector_metric(s)


def transform_state_amplitudes(s: State, f: FrameTransform) -> np.ndarray:
    g = sector_metric(s.sector)
    return s.amplitudes @ f.u(s.sector).conj().T @ g


def reconstruct(amplitudes, f: FrameTransform, s: Sector) -> SectorVector:
    """``S'^mu <e'_mu|`` back in unprimed components."""
    return SectorVector(s, np.asarray(amplitudes) @ primed_basis(f, s))


def transport(op: SectorOperator, f: FrameTransform) -> SectorOperator:
    """Primed matrix ``u g X g u^dagger`` of the same operator."""
    s = op.sector
    u, g = f.u(s), sector_metric(s)
    return SectorOperator.diagonal(s, u @ g @ op.entries @ g @ u.conj().T)


def pull_back(op: SectorOperator, f: FrameTransform) -> SectorOperator:
    """Inverse of :func:`transport`."""
    s = op.sector
    u, g = f.u(s), sector_metric(s)
    return SectorOperator.diagonal(s, g @ u.conj().T @ op.entries @ u @ g)


def transform_observable(obs, f: FrameTransform, policy: TransformPolicy) -> SectorOperator:
    op = obs.operator if isinstance(obs, Observable) else obs
    if not op.is_diagonal:
        raise SectorMismatchError("observables must be sector-preserving")
    policy = TransformPolicy(policy)
    if policy is TransformPolicy.FIXED_OPERATOR:
        return transport(op, f)
    u = f.map.block(op.sector)
    return compose(compose(star(u), op), u)


def transform_device(d: MeasurementDevice, f: FrameTransform) -> SectorOperator:
    return transport(d.realized, f)


def operator_from_basis(op: SectorOperator, basis: np.ndarray) -> SectorOperator:
    """Assemble ``sum |e_r> g* X_{r t} g* <e_t|`` over a given basis."""
    s = op.sector
    g = sector_metric(s)
    coeffs = g @ op.entries @ g
    total = np.zeros((2, 2), dtype=complex)
    for r in range(2):
        for t in range(2):
            e_r, e_t = SectorVector(s, basis[r]), SectorVector(s, basis[t])
            total = total + coeffs[r, t] * dyad(e_r, e_t).entries
    return SectorOperator.diagonal(s, total)


@dataclass(frozen=True)
class ClaimResult:
    claim: str
    anchor: str
    residual: float
    threshold: float
    # invariance claims pass below threshold, non-invariance claims above it
    expect_below: bool = True

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.residual):
            return False
        if self.expect_below:
            return self.residual < self.threshold
        return self.residual > self.threshold

    def to_dict(self) -> dict:
        return {
            "anchor": self.anchor,
            "residual": self.residual,
            "threshold": self.threshold,
            "status": "PASS" if self.passed else "FAIL",
        }


@dataclass
class InvarianceReport:
    """Per-claim residuals for one frame change.

    ``claims`` are asserted invariances; ``non_invariants`` assert a change
    and are only populated for frames away from the identity;
    ``informational`` holds values that are reported but not judged.
    """

    claims: dict = field(default_factory=dict)
    non_invariants: dict = field(default_factory=dict)
    informational: dict = field(default_factory=dict)
    skipped: list = field(default_factory=list)

    def add(self, claim: str, anchor: str, residual: float, threshold: float) -> None:
        prev = self.claims.get(claim)
        residual = float(residual)
        if prev is not None:
            residual = max(residual, prev.residual)
        self.claims[claim] = ClaimResult(claim, anchor, residual, threshold)

    def add_change(self, claim: str, anchor: str, change: float, threshold: float) -> None:
        prev = self.non_invariants.get(claim)
        change = float(change)
        if prev is not None:
            change = min(change, prev.residual)
        self.non_invariants[claim] = ClaimResult(claim, anchor, change, threshold, False)

    @property
    def residuals(self) -> dict:
        return {k: v.residual for k, v in self.claims.items()}

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims.values()) and all(
            c.passed for c in self.non_invariants.values()
        )

    def failures(self) -> list:
        return sorted(
            k
            for k, c in list(self.claims.items()) + list(self.non_invariants.items())
            if not c.passed
        )

    def to_dict(self) -> dict:
        return {
            "claims": {k: v.to_dict() for k, v in sorted(self.claims.items())},
            "non_invariants": {k: v.to_dict() for k, v in sorted(self.non_invariants.items())},
            "informational": dict(sorted(self.informational.items())),
            "skipped": sorted(set(self.skipped)),
            "passed": self.passed,
        }


def _g_inner(x, y, s: Sector) -> complex:
    return complex(s.sign * np.dot(x, np.conj(y)))


def _primed_state(s: State, f: FrameTransform) -> State:
    # the state as seen in primed components, with canonical basis labels
    return State(SectorVector(s.sector, transform_state_amplitudes(s, f)), s.label + "'")


def _metric_claims(rep: InvarianceReport, f: FrameTransform, tol: float) -> None:
    for s in Sector:
        u, g = f.u(s), sector_metric(s)
        rep.add("metric", "u g u* = g per sector", max_residual(u @ g @ u.conj().T, g), tol)
        rep.add("hilbert-metric", "u u^dagger = I per sector", max_residual(u @ u.conj().T, np.eye(2)), tol)
        basis = primed_basis(f, s)
        ident = SectorOperator.identity(s)
        rep.add(
            "completeness",
            "identity rebuilt from primed basis dyads",
            max_residual(operator_from_basis(ident, basis), ident),
            tol,
        )
        total = SectorOperator.diagonal(s, np.zeros((2, 2)))
        for mu in range(2):
            pi = pi_device(s, mu)
            moved = transform_device(pi, f)
            rep.add(
                "pi-reconstruction",
                "each pi rebuilt from its primed matrix and primed basis",
                max_residual(operator_from_basis(moved, basis), pi.realized),
                tol,
            )
            total = total + moved
        rep.add(
            "pi-trace-sum",
            "Tr(pi'_0 + pi'_1) = Tr(pi_0 + pi_1)",
            abs(sector_trace(total) - 2.0),
            tol,
        )


def _state_claims(rep: InvarianceReport, s: State, f: FrameTransform, tol: float, check_change: bool) -> None:
    sec = s.sector
    amps = s.amplitudes
    primed = transform_state_amplitudes(s, f)
    basis = primed_basis(f, sec)
    g_primed = np.array(
        [[_g_inner(basis[m], basis[n], sec) for n in range(2)] for m in range(2)]
    )
    norm_primed = complex(primed @ g_primed @ primed.conj())
    rep.add("norm", "<s'|s'>_g' = <s|s>_g", abs(norm_primed - sec.sign), tol)
    rep.add(
        "reconstruction",
        "S'^mu <e'_mu| = <s|",
        max_residual(reconstruct(primed, f, sec).components, amps),
        tol,
    )
    branches = [primed[m] * basis[m] for m in range(2)]
    rep.add("branch-sum", "<s'_(0)| + <s'_(1)| = <s|", max_residual(branches[0] + branches[1], amps), tol)

    # Born table from transported selectors acting on primed amplitudes
    total = 0.0
    for mu in range(2):
        pi_p = transform_device(pi_device(sec, mu), f)
        g = sector_metric(sec)
        moved = primed @ pi_p.delta @ g
        total += _g_inner(moved, primed, sec).real
    rep.add("born-sum", "sum of Born weights from transported selectors", abs(total - (born(s, 0) + born(s, 1))), tol)

    # exchange pairings rebuilt for the primed amplitudes
    try:
        ps = _primed_state(s, f)
        before = sum(
            pairing(s.branch(m), exchange_device(s, m, 1 - m), s.branch(1 - m)) for m in range(2)
        )
        after = sum(
            pairing(ps.branch(m), exchange_device(ps, m, 1 - m), ps.branch(1 - m)) for m in range(2)
        )
        rep.add("exchange-sum", "sum of exchange pairings", abs(after - before), tol)
    except ZeroBranchError:
        rep.skipped.append(f"exchange-sum:{s.label}")

    rep.informational[f"amplitude-change:{s.label}"] = float(np.abs(primed - amps).max())
    single = max(float(np.abs(branches[m] - s.branch(m).components).max()) for m in range(2))
    rep.informational[f"branch-change:{s.label}"] = single
    if check_change:
        threshold = 100 * tol
        rep.add_change("amplitudes", "individual primed amplitudes differ", float(np.abs(primed - amps).max()), threshold)
        rep.add_change("single-branch", "individual transported branches differ", single, threshold)


def _observable_claims(rep: InvarianceReport, obs: Observable, s: Optional[State], f: FrameTransform, tol: float) -> None:
    op = obs.operator
    fixed_m = transform_observable(obs, f, TransformPolicy.FIXED_MATRIX)
    fixed_o = transform_observable(obs, f, TransformPolicy.FIXED_OPERATOR)
    eig = np.sort(np.linalg.eigvals(fixed_m.delta).real)
    rep.add("spectrum-fixed-matrix", "eigenvalues of u* S u equal the spectrum", float(np.abs(eig - np.sort(obs.spectrum)).max()), tol)
    rep.add("trace-fixed-matrix", "Tr(u* S u) = Tr S", abs(sector_trace(fixed_m) - sector_trace(op)), tol)
    rep.add("trace-fixed-operator", "Tr(u g S g u*) = Tr S", abs(sector_trace(fixed_o) - sector_trace(op)), tol)
    if s is not None and s.sector is obs.sector:
        primed = transform_state_amplitudes(s, f)
        rep.informational[f"expectation-primed:{s.label}"] = float(
            np.dot(obs.spectrum, np.abs(primed) ** 2)
        )


def _pair_claims(rep: InvarianceReport, states: Sequence[State], f: FrameTransform, tol: float) -> None:
    """Weight sums and two-branch composite sums over states of one sector."""
    n = len(states)
    a, b, c, d = (states[k % n] for k in range(4))
    pa, pb, pc, pd = (_primed_state(x, f) for x in (a, b, c, d))
    tag = f"{a.label},{b.label},{c.label},{d.label}"

    def weight_sum(x, y):
        return sum(_g_inner(y.branch(m).components, x.branch(m).components, x.sector) for m in range(2))

    rep.add("weight-sum", "<c_(0)|a_(0)> + <c_(1)|a_(1)>", abs(weight_sum(pa, pc) - weight_sum(a, c)), tol)

    sec = a.sector
    rebuilt_states = {"a": pa, "b": pb, "c": pc, "d": pd}
    plain_states = {"a": a, "b": b, "c": c, "d": d}
    # each composite is a sum over branches of a two-device product
    composites = {
        "m-composition-sum": ("sum over branches of M(a,b)M(c,d)", lambda st, m: (
            m_device(st["a"], st["b"], m), m_device(st["c"], st["d"], m))),
        "pi-m-composition-sum": ("sum over branches of Pi(a)M(c,d)", lambda st, m: (
            big_pi(st["a"], m), m_device(st["c"], st["d"], m))),
    }
    for claim, (anchor, devices) in composites.items():
        pairs = [devices(plain_states, m) for m in range(2)]
        unprimed = sum(compose(x.realized, y.realized).entries for x, y in pairs)
        unprimed = SectorOperator.diagonal(sec, unprimed)
        # covariant route: transport every device, compose in the primed frame
        primed_ops = sum(
            compose(transport(x.realized, f), transport(y.realized, f)).entries for x, y in pairs
        )
        covariant = pull_back(SectorOperator.diagonal(sec, primed_ops), f)
        rep.add(claim, anchor + ", composed from transported devices", max_residual(covariant, unprimed), tol)
        # rebuilding the devices from primed amplitudes is not covariant
        rebuilt = sum(
            compose(x.realized, y.realized).entries
            for x, y in (devices(rebuilt_states, m) for m in range(2))
        )
        rebuilt = pull_back(SectorOperator.diagonal(sec, rebuilt), f)
        rep.informational[f"{claim}-rebuilt:{tag}"] = max_residual(rebuilt, unprimed)


def invariance_report(
    states: Sequence[State],
    f: FrameTransform,
    observables: Sequence[Observable] = (),
    tol: float = TOL,
) -> InvarianceReport:
    """Residuals of every frame invariance claim for the given systems.

    ``observables`` pair with ``states`` by position; use ``None`` for a
    system without one.  Non-invariance checks run only for sectors whose
    frame block is farther than ``100 * tol`` from the identity.
    """
    rep = InvarianceReport()
    _metric_claims(rep, f, tol)
    observables = list(observables) + [None] * (len(states) - len(observables))
    by_sector = {}
    for s, obs in zip(states, observables):
        far = f.distance_from_identity(s.sector) > 100 * tol
        _state_claims(rep, s, f, tol, far)
        if obs is not None:
            _observable_claims(rep, obs, s, f, tol)
        by_sector.setdefault(s.sector, []).append(s)
    for sec in Sector:
        if sec in by_sector:
            _pair_claims(rep, by_sector[sec], f, tol)
    return rep
