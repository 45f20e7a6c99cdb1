import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracle
from cartanq.core import TOL, Sector
from cartanq.group import (
    SIGMA,
    DynFrameMap,
    GroupElement,
    NotInGroupError,
    NotNormalizedError,
    SL2CElement,
    SU2Element,
    TranslationMatrix,
    algebra_element,
    block_constraint_residuals,
    cartan_decompose,
    dyn_companion,
    dyn_matrix,
    dyn_restriction,
    group_from_params,
    is_pseudo_unitary,
    is_unitary,
    lorentz_matrix,
    poincare_matrix,
    random_dyn_frame,
    random_sl2c,
    random_su2,
    random_su22,
    random_translation,
)
from cartanq.operators import NonBlockDiagonalError, block_decompose, compose, sector_trace, star

G4 = oracle.G4
I2 = np.eye(2)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def pu_residual(m):
    # written out independently of the package
    return np.abs(m @ G4 @ m.conj().T - G4).max()


class TestCertificates:
    def test_examples(self):
        assert is_pseudo_unitary(np.eye(4))
        assert is_pseudo_unitary(G4)
        assert not is_pseudo_unitary(np.diag([2, 1, 1, 0.5]))

    def test_identity_certified(self):
        e = GroupElement.identity()
        assert e.certified == {"pseudo_unitary", "special", "unitary"}
        assert e.in_su22 and e.recheck()

    def test_non_member_not_certified(self):
        u = GroupElement.certify(np.diag([2, 1, 1, 0.5]))
        assert "pseudo_unitary" not in u.certified
        assert "special" in u.certified
        assert not u.in_su22

    def test_boost_is_not_unitary(self):
        # hyperbolic rotation mixing one plus and one minus direction
        t = 0.7
        m = np.eye(4, dtype=complex)
        m[0, 0] = m[2, 2] = np.cosh(t)
        m[0, 2] = m[2, 0] = np.sinh(t)
        u = GroupElement.certify(m)
        assert u.in_su22 and "unitary" not in u.certified

    @given(seeds)
    def test_product_stays_in_group(self, seed):
        a, b = random_su22(seed), random_su22(seed + 1)
        ab = a @ b
        assert ab.in_su22
        assert pu_residual(ab.matrix) < 1e-9


class TestSmallGroups:
    def test_sl2c_requires_unit_det(self):
        with pytest.raises(ValueError):
            SL2CElement(2 * I2)
        SL2CElement([[2, 0], [0, 0.5]])

    def test_su2_requires_unitary(self):
        with pytest.raises(ValueError):
            SU2Element([[2, 0], [0, 0.5]])
        SU2Element(1j * SIGMA[0])

    def test_translation_hermitian(self):
        with pytest.raises(ValueError):
            TranslationMatrix([[0, 1], [0, 0]])

    def test_translation_normalization(self):
        with pytest.raises(NotNormalizedError):
            TranslationMatrix(2 * I2, normalized=True)
        w = TranslationMatrix.from_params(0.3, [1.0, -2.0, 0.5], normalized=True)
        assert np.allclose(w.matrix @ w.matrix, I2)
        assert np.allclose(w.matrix, w.matrix.conj().T)

    def test_random_generators(self, rng):
        for _ in range(50):
            a = random_sl2c(rng)
            assert abs(np.linalg.det(a.matrix) - 1) < 1e-12
            b = random_su2(rng)
            assert np.allclose(b.matrix @ b.matrix.conj().T, I2)
            w = random_translation(rng, normalized=True)
            assert np.allclose(w.matrix @ w.matrix, I2)


class TestBlockConstraints:
    def test_identity_exact(self):
        r = block_constraint_residuals(GroupElement.identity())
        assert set(r) == {"plus", "minus", "offdiag", "offdiag_star"}
        assert all(v == 0 for v in r.values())

    def test_block_diagonal_offdiag_zero(self):
        u = dyn_companion(SU2Element(1j * SIGMA[1]))
        r = block_constraint_residuals(u)
        assert r["offdiag"] == 0 and r["offdiag_star"] == 0

    @given(seeds)
    def test_random_elements(self, seed):
        r = block_constraint_residuals(random_su22(seed))
        assert max(r.values()) < TOL

    def test_non_member_detected(self):
        r = block_constraint_residuals(np.diag([2, 1, 1, 0.5]))
        assert max(r.values()) > 1


class TestCartan:
    def test_identity(self):
        f = cartan_decompose(GroupElement.identity())
        assert np.allclose(f.unitary_part.matrix, np.eye(4))
        assert np.allclose(f.positive_part.matrix, np.eye(4))

    def test_unitary_input(self, rng):
        u = dyn_matrix(random_su2(rng), random_translation(rng, normalized=True))
        f = cartan_decompose(u)
        assert np.abs(f.positive_part.matrix - np.eye(4)).max() < 1e-12
        assert np.abs(f.unitary_part.matrix - u.matrix).max() < 1e-12

    def test_positive_input(self):
        t = 0.4
        h = np.eye(4, dtype=complex)
        h[1, 1] = h[3, 3] = np.cosh(t)
        h[1, 3] = h[3, 1] = np.sinh(t)
        f = cartan_decompose(GroupElement.certify(h))
        assert np.abs(f.unitary_part.matrix - np.eye(4)).max() < 1e-12
        assert np.abs(f.positive_part.matrix - h).max() < 1e-12

    @given(seeds)
    def test_against_scipy_polar(self, seed):
        u = random_su22(seed)
        U_ref, H_ref = oracle.polar_right(np.array(u.matrix))
        f = cartan_decompose(u)
        U, H = f.unitary_part.matrix, f.positive_part.matrix
        assert np.abs(U - U_ref).max() < 1e-9
        assert np.abs(H - H_ref).max() < 1e-9
        assert np.abs(U @ H - u.matrix).max() < 10 * TOL
        assert np.abs(H @ H - u.matrix.conj().T @ u.matrix).max() < 10 * TOL
        # both factors are group elements in their own right
        assert f.unitary_part.in_su22 and "unitary" in f.unitary_part.certified
        assert pu_residual(H) < 10 * TOL and abs(np.linalg.det(H) - 1) < 10 * TOL
        assert np.linalg.eigvalsh(H).min() > 0

    def test_rejects_non_member(self):
        with pytest.raises(NotInGroupError):
            cartan_decompose(GroupElement.certify(np.diag([2, 1, 1, 0.5])))


class TestPoincare:
    def test_trivial(self):
        p = poincare_matrix(SL2CElement(I2), TranslationMatrix.zero())
        assert np.allclose(p.matrix, np.diag([1, 1, -1, -1]))
        assert p.in_su22

    def test_pure_translation(self):
        s3 = SIGMA[2]
        p = poincare_matrix(SL2CElement(I2), TranslationMatrix(s3)).matrix
        assert np.allclose(p[:2, :2], (2 * I2 + 1j * s3) / 2)
        assert np.allclose(p[:2, 2:], -1j * s3 / 2)
        assert np.allclose(p[2:, :2], -1j * s3 / 2)
        assert np.allclose(p[2:, 2:], (-2 * I2 + 1j * s3) / 2)
        assert is_pseudo_unitary(p)

    def test_lorentz_is_zero_translation(self, rng):
        a = random_sl2c(rng)
        assert np.array_equal(lorentz_matrix(a).matrix, poincare_matrix(a, TranslationMatrix.zero()).matrix)

    def test_random_members(self, rng):
        for _ in range(200):
            p = poincare_matrix(random_sl2c(rng), random_translation(rng))
            assert pu_residual(p.matrix) < 1e-9
            assert abs(np.linalg.det(p.matrix) - 1) < 1e-9


class TestDyn:
    def test_example(self):
        d = dyn_matrix(SU2Element(I2), TranslationMatrix(SIGMA[2], normalized=True))
        a, b = (1 + 1j) / np.sqrt(2), (1 - 1j) / np.sqrt(2)
        assert np.allclose(d.matrix, np.diag([a, b, b, a]))
        assert {"unitary", "pseudo_unitary"} <= d.certified

    def test_requires_normalized(self):
        with pytest.raises(NotNormalizedError):
            dyn_matrix(SU2Element(I2), TranslationMatrix(0.5 * SIGMA[0]))

    def test_companion(self, rng):
        beta = random_su2(rng)
        d = dyn_companion(beta).matrix
        assert np.allclose(d[:2, :2], beta.matrix)
        assert np.allclose(d[2:, 2:], beta.matrix.conj().T)

    def test_random_block_diagonal_and_unitary(self, rng):
        for _ in range(200):
            d = dyn_matrix(random_su2(rng), random_translation(rng, normalized=True))
            b = block_decompose(d.operator)
            assert np.abs(b.pm.entries).max() < 1e-15 and np.abs(b.mp.entries).max() < 1e-15
            assert is_unitary(d) and is_pseudo_unitary(d)

    def test_restriction_identity(self):
        r = dyn_restriction(GroupElement.identity())
        assert np.array_equal(r.plus.entries, I2)
        assert np.array_equal(r.minus.entries, I2)
        assert r.plus.domain is Sector.PLUS and r.minus.domain is Sector.MINUS

    def test_restriction_blocks(self, rng):
        beta, w = random_su2(rng), random_translation(rng, normalized=True)
        r = dyn_restriction(dyn_matrix(beta, w))
        assert np.allclose(r.plus.entries, (I2 + 1j * w.matrix) @ beta.matrix / np.sqrt(2))
        for s in Sector:
            b = r.block(s)
            assert abs(sector_trace(compose(b, star(b))) - 2) < 1e-12
            # u g u* = g on each sector
            gs = s.sign * I2
            assert np.abs(b.entries @ gs @ b.entries.conj().T - gs).max() < 1e-12

    def test_restriction_rejects(self):
        with pytest.raises(NonBlockDiagonalError):
            dyn_restriction(GroupElement.certify(np.ones((4, 4))))
        t = 0.7
        m = np.eye(4, dtype=complex)
        m[0, 0], m[1, 1] = np.exp(t), np.exp(-t)
        with pytest.raises(NotInGroupError):
            dyn_restriction(GroupElement.certify(m))

    def test_frame_map_validation(self):
        from cartanq.operators import SectorOperator

        with pytest.raises(ValueError):
            DynFrameMap(SectorOperator.identity("+"), SectorOperator.diagonal("-", 2 * I2))
        with pytest.raises(ValueError):
            DynFrameMap(SectorOperator.identity("-"), SectorOperator.identity("-"))
        assert DynFrameMap.identity().distance_from_identity() == 0
        assert random_dyn_frame(3).distance_from_identity() > 1e-3


class TestRandom:
    def test_zero_generator(self):
        assert np.allclose(group_from_params(np.zeros(15)).matrix, G4)
        assert group_from_params(np.zeros(15)).in_su22

    def test_generators_are_pseudo_anti_hermitian(self, rng):
        for _ in range(20):
            x = algebra_element(rng.uniform(-1, 1, 15))
            assert np.allclose(G4 @ x.conj().T @ G4, -x)
            assert abs(np.trace(x)) < 1e-15

    def test_basis_spans_fifteen_dimensions(self):
        from cartanq.group import SU22_ALGEBRA_BASIS

        flat = np.array([np.concatenate([b.real.ravel(), b.imag.ravel()]) for b in SU22_ALGEBRA_BASIS])
        assert np.linalg.matrix_rank(flat) == 15

    def test_deterministic(self):
        assert np.array_equal(random_su22(7).matrix, random_su22(7).matrix)
        assert not np.array_equal(random_su22(7).matrix, random_su22(8).matrix)

    def test_many_seeds(self):
        worst = max(pu_residual(random_su22(seed).matrix) for seed in range(1000))
        assert worst < TOL
        worst_det = max(abs(np.linalg.det(random_su22(seed).matrix) - 1) for seed in range(200))
        assert worst_det < TOL
