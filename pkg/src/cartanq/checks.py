"""Seeded randomized suites behind ``cartanq check``.

Every suite draws from its own child of ``numpy.random.SeedSequence(seed)``
(PCG64 bit generator), so results depend only on the seed and the number
of trials.  Each claim keeps the worst residual seen and how many trials
broke its threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    DELTA,
    G,
    TOL,
    CartanVector,
    Sector,
    SectorVector,
    adjoint_components,
    adjoint_sector_inner,
    apply_metric,
    embed,
    hilbert_inner,
    indefinite_inner,
    project,
    sector_inner,
    sector_metric,
)
from .frames import FrameTransform, invariance_report
from .group import (
    block_constraint_residuals,
    cartan_decompose,
    det_residual,
    dyn_matrix,
    dyn_restriction,
    poincare_matrix,
    pseudo_unitary_residual,
    random_dyn_frame,
    random_sl2c,
    random_su2,
    random_su22,
    random_translation,
    unitary_residual,
)
from .measurement import (
    Observable,
    State,
    apply_pi,
    big_pi,
    born,
    compose_sequence,
    density,
    expectation,
    expectation_trace,
    m_device,
    pi_device,
    star_interchange_residual,
)
from .operators import (
    Operator,
    SectorOperator,
    adjoint_representation,
    compose,
    dagger,
    max_residual,
    projector,
    sector_trace,
    star,
)

SUITES = ("metric", "trace", "group", "measurement", "frame")


@dataclass
class Tally:
    threshold: float
    worst: float = 0.0
    failures: int = 0
    count: int = 0
    # True for claims that must stay below the threshold
    below: bool = True

    def record(self, value: float) -> None:
        value = float(value)
        self.count += 1
        if self.below:
            self.worst = max(self.worst, value) if np.isfinite(value) else float("inf")
            ok = value < self.threshold
        else:
            self.worst = value if self.count == 1 else min(self.worst, value)
            ok = value > self.threshold
        if not ok:
            self.failures += 1

    def to_dict(self) -> dict:
        key = "max_residual" if self.below else "min_change"
        return {
            key: self.worst,
            "threshold": self.threshold,
            "samples": self.count,
            "failures": self.failures,
            "status": "PASS" if self.failures == 0 else "FAIL",
        }


@dataclass
class SuiteResult:
    name: str
    trials: int
    tallies: dict = field(default_factory=dict)

    def record(self, claim: str, value: float, threshold: float, below: bool = True) -> None:
        t = self.tallies.get(claim)
        if t is None:
            t = self.tallies[claim] = Tally(threshold, below=below)
        t.record(value)

    @property
    def passed(self) -> bool:
        return all(t.failures == 0 for t in self.tallies.values())

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "claims": {k: v.to_dict() for k, v in sorted(self.tallies.items())},
            "passed": self.passed,
        }


def _cvec(rng, n):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def _cmat(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def random_state(rng, sector, label: str = "") -> State:
    v = _cvec(rng, 2)
    return State(SectorVector(sector, v / np.linalg.norm(v)), label)


def metric_suite(rng, trials: int, tol: float) -> SuiteResult:
    res = SuiteResult("metric", trials)
    for _ in range(trials):
        x, y = CartanVector(_cvec(rng, 4)), CartanVector(_cvec(rng, 4))
        a = Operator(_cmat(rng, 4))
        res.record("inner-via-metric", abs(indefinite_inner(x, y) - hilbert_inner(x, apply_metric(y))), tol)
        split = embed(project(x, Sector.PLUS)) + embed(project(x, Sector.MINUS))
        res.record("sector-split", max_residual(split.components, x.components), tol)
        parts = sum(sector_inner(project(x, s), project(y, s)) for s in Sector)
        res.record("inner-sector-sum", abs(indefinite_inner(x, y) - parts), tol)
        res.record("star-from-dagger", max_residual(star(a).delta, G @ dagger(a).delta @ G), tol)
        lhs = indefinite_inner(CartanVector(a.delta @ x.components), y)
        rhs = indefinite_inner(x, CartanVector(star(a).delta @ y.components))
        res.record("star-adjointness", abs(lhs - rhs), tol)
        for s in Sector:
            block = SectorOperator.diagonal(s, a.entries[s.indices, s.indices])
            adj = adjoint_representation(block)
            d = DELTA[:2, :2]
            res.record("star-adjoint-entries", max_residual(star(block).entries, d @ adj.conj().T @ d), tol)
            xs, ys = project(x, s), project(y, s)
            low = adjoint_sector_inner(adjoint_components(xs), adjoint_components(ys), s)
            res.record("reflexive-norms", abs(low - sector_inner(xs, ys)), tol)
    pp, pm = projector(Sector.PLUS), projector(Sector.MINUS)
    ident = Operator.identity()
    res.record("projector-sum", max_residual(pp + pm, ident), tol)
    res.record("projector-idempotent", max(max_residual(compose(p, p), p) for p in (pp, pm)), tol)
    res.record("projector-orthogonal", max_residual(compose(pp, pm).entries, np.zeros((4, 4))), tol)
    res.record("projector-pseudo-hermitian", max(max_residual(star(p), p) for p in (pp, pm)), tol)
    return res


def trace_suite(rng, trials: int, tol: float) -> SuiteResult:
    res = SuiteResult("trace", trials)
    for s in Sector:
        # exact, no tolerance
        res.record("identity-trace", abs(sector_trace(SectorOperator.identity(s)) - 2.0), np.nextafter(0, 1))
    for _ in range(trials):
        frame = random_dyn_frame(rng)
        for s in Sector:
            a = SectorOperator.diagonal(s, _cmat(rng, 2))
            b = SectorOperator.diagonal(s, _cmat(rng, 2))
            res.record("conjugate-trace", abs(sector_trace(a) - np.conj(sector_trace(star(a)))), tol)
            res.record("cyclic", abs(sector_trace(compose(a, b)) - sector_trace(compose(b, a))), tol)
            res.record("real-norm-trace", abs(sector_trace(compose(a, star(a))).imag), tol)
            h = a + star(a)
            res.record("pseudo-hermitian-real", abs(sector_trace(h).imag), tol)
            res.record("pseudo-hermitian-square-real", abs(sector_trace(compose(h, h)).imag), tol)
            u = frame.block(s)
            res.record("pseudo-unitary-trace", abs(sector_trace(compose(u, star(u))) - 2.0), tol)
            res.record("star-dagger-trace", abs(sector_trace(star(u)) - sector_trace(dagger(u))), tol)
            explicit = np.trace(star(u).entries @ sector_metric(s)) - np.trace(dagger(u).delta)
            res.record("star-dagger-entry-trace", abs(explicit), tol)
    return res


def group_suite(rng, trials: int, tol: float) -> SuiteResult:
    res = SuiteResult("group", trials)
    loose = 10 * tol
    prev = None
    for _ in range(trials):
        u = random_su22(int(rng.integers(0, 2**63 - 1)))
        res.record("su22-pseudo-unitary", pseudo_unitary_residual(u), tol)
        res.record("su22-det", det_residual(u), loose)
        for k, v in block_constraint_residuals(u).items():
            res.record(f"block-constraint-{k}", v, tol)
        f = cartan_decompose(u)
        U, H = f.unitary_part.matrix, f.positive_part.matrix
        res.record("cartan-reconstruction", max_residual(U @ H, u.matrix), loose)
        res.record("cartan-unitary", unitary_residual(U), loose)
        res.record("cartan-square", max_residual(H @ H, u.matrix.conj().T @ u.matrix), loose)
        # positive definite: report the shortfall below zero
        res.record("cartan-positive", max(0.0, -np.linalg.eigvalsh(H).min()), np.nextafter(0, 1))
        if prev is not None:
            res.record("closure", pseudo_unitary_residual(prev.matrix @ G @ u.matrix), loose)
        prev = u
        p = poincare_matrix(random_sl2c(rng), random_translation(rng))
        res.record("poincare-pseudo-unitary", pseudo_unitary_residual(p), tol)
        res.record("poincare-det", det_residual(p), loose)
        d = dyn_matrix(random_su2(rng), random_translation(rng, normalized=True))
        res.record("dyn-unitary", unitary_residual(d), tol)
        res.record("dyn-pseudo-unitary", pseudo_unitary_residual(d), tol)
        blocks = dyn_restriction(d)
        dets = np.linalg.det(blocks.plus.entries) * np.linalg.det(blocks.minus.entries)
        res.record("dyn-block-det", abs(dets - 1.0), tol)
    return res


def measurement_suite(rng, trials: int, tol: float) -> SuiteResult:
    res = SuiteResult("measurement", trials)
    zero = np.zeros((2, 2))
    for s in Sector:
        for mu in range(2):
            pi = pi_device(s, mu).realized
            res.record("pi-idempotent", max_residual(compose(pi, pi), pi), np.nextafter(0, 1))
            res.record("pi-trace", abs(sector_trace(pi) - 1.0), np.nextafter(0, 1))
    for _ in range(trials):
        for s in Sector:
            sg = s.sign
            a, b, c, d = (random_state(rng, s, k) for k in "abcd")
            A, B, C, D = (x.amplitudes for x in (a, b, c, d))

            def gi(x, y, m):
                return sg * x[m] * np.conj(y[m])

            res.record("born-sum", abs(born(a, 0) + born(a, 1) - 1.0), 1e-2 * tol)
            branches = apply_pi(a, 0).vector + apply_pi(a, 1).vector
            res.record("branch-split", max_residual(branches.components, A), np.nextafter(0, 1))
            norms = sum(sector_inner(apply_pi(a, m).vector, apply_pi(a, m).vector) for m in range(2))
            res.record("branch-norms-add", abs(norms - sector_inner(a.vector, a.vector)), tol)
            res.record("star-interchange", max(star_interchange_residual(a, 0, 1), star_interchange_residual(a, 1, 0)), tol)
            obs = Observable(s, (rng.normal(), rng.normal() + 4.0))
            res.record("expectation-routes", abs(expectation(obs, a) - expectation_trace(obs, a)), tol)
            rho = density(a).op
            res.record("density-fixes-state", max_residual(rho.bra_apply(a.vector).components, A), tol)
            res.record("density-trace", abs(sector_trace(rho) - 1.0), tol)
            for m in range(2):
                pib, pia = big_pi(b, m), big_pi(a, m)
                r = compose_sequence([pib, pia, pib])
                expected = abs(gi(B, A, m)) ** 2 * pib.realized
                res.record("sandwich", max_residual(r.operator, expected), tol)
                res.record("sandwich-weight", abs(r.transmission - abs(gi(B, A, m)) ** 2), tol)
                crossed = compose_sequence([big_pi(b, 1 - m), pia, pib]).operator
                res.record("sandwich-crossed-zero", max_residual(crossed.entries, zero), tol)
                r = compose_sequence([pib, pi_device(s, m), pib])
                res.record("hidden-middle", max_residual(r.operator, sg * gi(B, B, m) * pib.realized), tol)
                res.record("hidden-middle-weight", abs(r.transmission - gi(B, B, m)), tol)
                r = compose_sequence([pia, pib, big_pi(c, m)])
                expected = gi(A, B, m) * gi(B, C, m) * m_device(a, c, m).realized
                res.record("triple", max_residual(r.operator, expected), tol)
                r = compose_sequence([m_device(a, b, m), m_device(c, d, m)])
                expected = sg * gi(B, C, m) * m_device(a, d, m).realized
                res.record("m-composition", max_residual(r.operator, expected), tol)
                res.record("m-composition-trace", abs(r.trace - gi(B, C, m) * gi(D, A, m)), tol)
                r = compose_sequence([pia, m_device(c, d, m)])
                res.record("pi-m-trace", abs(r.trace - gi(D, A, m) * gi(A, C, m)), tol)
                res.record("pi-m-composition", max_residual(r.operator, sg * gi(A, C, m) * m_device(a, d, m).realized), tol)
    return res


def frame_suite(rng, trials: int, tol: float) -> SuiteResult:
    res = SuiteResult("frame", trials)
    for _ in range(trials):
        f = FrameTransform(random_dyn_frame(rng))
        states = [random_state(rng, s, f"{s.name.lower()}{k}") for s in Sector for k in range(2)]
        observables = [Observable(x.sector, (rng.normal(), rng.normal() + 4.0)) for x in states]
        rep = invariance_report(states, f, observables, tol)
        for k, c in rep.claims.items():
            res.record(k, c.residual, c.threshold)
        for k, c in rep.non_invariants.items():
            res.record(f"changes-{k}", c.residual, c.threshold, below=False)
        for k in rep.skipped:
            res.record("skipped", 1.0, 0.5, below=False)
    return res


_SUITE_FUNCS = {
    "metric": metric_suite,
    "trace": trace_suite,
    "group": group_suite,
    "measurement": measurement_suite,
    "frame": frame_suite,
}


def run_check(seed: int, trials: int, tol: float = TOL, suites=SUITES) -> dict:
    """Run the named suites and return a JSON-ready report."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    children = np.random.SeedSequence(seed).spawn(len(SUITES))
    streams = dict(zip(SUITES, children))
    out = {}
    for name in suites:
        rng = np.random.Generator(np.random.PCG64(streams[name]))
        out[name] = _SUITE_FUNCS[name](rng, trials, tol).to_dict()
    return {
        "command": "check",
        "seed": seed,
        "trials": trials,
        "tol": tol,
        "suites": out,
        "passed": all(s["passed"] for s in out.values()),
    }
