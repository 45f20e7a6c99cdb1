import numpy as np
from hypothesis import given, strategies as st

import oracle
from conftest import unit_pairs
from cartanq.core import Sector, SectorVector
from cartanq.frames import (
    FrameTransform,
    InvarianceReport,
    TransformPolicy,
    invariance_report,
    operator_from_basis,
    primed_basis,
    pull_back,
    reconstruct,
    transform_device,
    transform_observable,
    transform_state_amplitudes,
    transport,
)
from cartanq.group import random_dyn_frame
from cartanq.measurement import Observable, big_pi, make_state, pi_device
from cartanq.operators import SectorOperator, compose, dyad, sector_trace

SECTORS = (Sector.PLUS, Sector.MINUS)
TOL = 1e-10
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def frame(seed):
    return FrameTransform(random_dyn_frame(seed), f"random-{seed}")


def blocks(f, s):
    # the frame block and the sector metric as plain arrays
    return np.array(f.map.block(s).entries), s.sign * np.eye(2)


class TestIdentityFrame:
    def test_amplitudes_unchanged(self):
        f = FrameTransform.identity()
        for s in SECTORS:
            st_ = make_state((0.6, 0.8j), s)
            assert np.array_equal(transform_state_amplitudes(st_, f), st_.amplitudes)

    def test_observables_unchanged(self):
        f = FrameTransform.identity()
        for s in SECTORS:
            obs = Observable(s, (1.5, -2.0))
            for p in TransformPolicy:
                assert np.array_equal(transform_observable(obs, f, p).entries, obs.operator.entries)
            d = pi_device(s, 1)
            assert np.array_equal(transform_device(d, f).entries, d.realized.entries)

    def test_report_exact(self):
        f = FrameTransform.identity()
        states = [make_state((0.6, 0.8), "+", "a"), make_state((0.8, -0.6j), "+", "b"), make_state((1j, 0), "-", "c")]
        rep = invariance_report(states, f, [Observable("+", (1, 2)), None, Observable("-", (0, 3))])
        assert rep.passed
        assert max(rep.residuals.values()) == 0
        assert not rep.non_invariants
        assert rep.informational["amplitude-change:a"] == 0

    def test_policy_values(self):
        assert {p.value for p in TransformPolicy} == {"fixed-operator", "fixed-matrix"}


class TestAgainstDirectFormulas:
    @given(seeds, unit_pairs())
    def test_state_transport(self, seed, amps):
        f = frame(seed)
        for s in SECTORS:
            u, g = blocks(f, s)
            assert np.abs(u @ g @ u.conj().T - g).max() < TOL
            assert np.abs(u @ u.conj().T - np.eye(2)).max() < TOL
            basis = u @ g
            assert np.array_equal(primed_basis(f, s), basis)
            primed = transform_state_amplitudes(make_state(amps, s), f)
            assert abs(np.sum(np.abs(primed) ** 2) - 1) < TOL
            # primed components along the primed basis give back the bra
            rebuilt = primed[0] * basis[0] + primed[1] * basis[1]
            assert np.abs(rebuilt - amps).max() < TOL
            assert np.abs(reconstruct(primed, f, s).components - amps).max() < TOL
            # the primed g-products of the primed basis
            gram = np.array([[oracle.g_inner2(basis[m], basis[n], s.sign) for n in range(2)] for m in range(2)])
            norm = primed @ gram @ primed.conj()
            assert abs(norm - s.sign) < TOL

    @given(seeds, st.floats(-5, 5), st.floats(-5, 5))
    def test_fixed_matrix_spectrum(self, seed, s0, s1):
        if abs(s0 - s1) < 1e-3:
            return
        f = frame(seed)
        for s in SECTORS:
            obs = Observable(s, (s0, s1))
            out = transform_observable(obs, f, TransformPolicy.FIXED_MATRIX)
            eig = np.sort(np.linalg.eigvals(out.delta).real)
            assert np.abs(eig - np.sort([s0, s1])).max() < 1e-9
            u, g = blocks(f, s)
            # u* S u with the metric between factors, written out
            u_star = g @ u.conj().T @ g
            by_hand = u_star @ g @ obs.operator.entries @ g @ u
            assert np.abs(out.entries - by_hand).max() < 1e-9
            fo = transform_observable(obs, f, TransformPolicy.FIXED_OPERATOR)
            assert abs(sector_trace(fo) - (s0 + s1)) < 1e-9
            assert abs(sector_trace(out) - (s0 + s1)) < 1e-9

    def test_transport_round_trip(self, rng):
        for seed in range(50):
            f = frame(seed)
            for s in SECTORS:
                x = SectorOperator.diagonal(s, oracle.rand_complex(rng, (2, 2)))
                assert np.abs(pull_back(transport(x, f), f).entries - x.entries).max() < TOL
                y = SectorOperator.diagonal(s, oracle.rand_complex(rng, (2, 2)))
                lhs = transport(compose(x, y), f)
                rhs = compose(transport(x, f), transport(y, f))
                assert np.abs(lhs.entries - rhs.entries).max() < 1e-9

    def test_device_completeness(self):
        for seed in range(50):
            f = frame(seed)
            for s in SECTORS:
                basis = primed_basis(f, s)
                moved = [transform_device(pi_device(s, m), f) for m in range(2)]
                total = moved[0] + moved[1]
                assert abs(sector_trace(total) - 2) < TOL
                assert np.abs(total.entries - SectorOperator.identity(s).entries).max() < TOL
                # rebuilt from dyads over the primed basis, written out
                for m in range(2):
                    coeffs = s.sign * np.eye(2) @ moved[m].entries @ (s.sign * np.eye(2))
                    acc = sum(
                        coeffs[r, t] * oracle.dyad_map(basis[r], basis[t], s.sign)
                        for r in range(2)
                        for t in range(2)
                    )
                    assert np.abs(acc - oracle.pi_map(m)).max() < TOL
                    assert np.abs(operator_from_basis(moved[m], basis).delta - oracle.pi_map(m)).max() < TOL

    def test_branch_sum_invariant_single_branches_not(self, rng):
        for seed in range(100):
            f = frame(seed)
            for s in SECTORS:
                amps = oracle.rand_unit(rng)
                primed = transform_state_amplitudes(make_state(amps, s), f)
                basis = primed_basis(f, s)
                parts = [primed[m] * basis[m] for m in range(2)]
                assert np.abs(parts[0] + parts[1] - amps).max() < TOL
                single = max(np.abs(parts[m] - oracle.branch(amps, m)).max() for m in range(2))
                assert single > 1e-8
                assert np.abs(primed - amps).max() > 1e-8

    def test_born_sum_from_transported_selectors(self, rng):
        for seed in range(50):
            f = frame(seed)
            for s in SECTORS:
                amps = oracle.rand_unit(rng)
                u, g = blocks(f, s)
                primed = amps @ u.conj().T @ g
                total = 0
                for m in range(2):
                    p = transform_device(pi_device(s, m), f).delta
                    total += oracle.g_inner2(primed @ p @ g, primed, s.sign).real
                assert abs(total - 1) < 1e-12

    def test_dyadic_devices_covariant(self, rng):
        for seed in range(30):
            f = frame(seed)
            for s in SECTORS:
                a = make_state(oracle.rand_unit(rng), s)
                for m in range(2):
                    d = big_pi(a, m)
                    t = transform_device(d, f)
                    # the transported device is the dyad of transported components
                    u, g = blocks(f, s)
                    ket = a.branch(m).components @ u.conj().T @ g
                    expected = s.sign * dyad(SectorVector(s, ket), SectorVector(s, ket))
                    assert np.abs(t.entries - expected.entries).max() < TOL


class TestReport:
    @given(seeds)
    def test_random_frames_pass(self, seed):
        rng = np.random.default_rng(seed)
        states = [make_state(oracle.rand_unit(rng), s, f"{s}{k}") for s in SECTORS for k in range(2)]
        obs = [Observable(s.sector, tuple(rng.normal(size=2))) for s in states]
        rep = invariance_report(states, frame(seed), obs)
        assert rep.passed, rep.failures()
        for claim in ("metric", "completeness", "norm", "reconstruction", "branch-sum", "born-sum",
                      "spectrum-fixed-matrix", "trace-fixed-operator", "weight-sum", "m-composition-sum"):
            assert claim in rep.claims
        for claim in ("amplitudes", "single-branch"):
            assert rep.non_invariants[claim].residual > 1e-8

    def test_zero_branch_skips_exchange(self):
        states = [make_state((1, 0), "+", "e")]
        rep = invariance_report(states, frame(1))
        assert "exchange-sum:e" in rep.skipped
        assert rep.passed

    def test_near_identity_skips_change_assertions(self):
        rep = invariance_report([make_state((0.6, 0.8), "+")], FrameTransform.identity())
        assert "amplitudes" not in rep.non_invariants

    def test_failures_reported(self):
        rep = InvarianceReport()
        rep.add("x", "anchor", 1.0, 1e-10)
        rep.add("x", "anchor", 0.0, 1e-10)
        rep.add_change("y", "anchor", 0.0, 1e-8)
        assert not rep.passed
        assert rep.residuals["x"] == 1.0
        assert set(rep.failures()) == {"x", "y"}
        doc = rep.to_dict()
        assert doc["claims"]["x"]["status"] == "FAIL"
