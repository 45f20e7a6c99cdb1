import numpy as np
import pytest
from hypothesis import given

import oracle
from conftest import complex_arrays
from cartanq.core import (
    G,
    CartanVector,
    Sector,
    SectorMismatchError,
    SectorVector,
    adjoint_components,
    adjoint_sector_inner,
    apply_metric,
    embed,
    hilbert_inner,
    hilbert_sector_inner,
    indefinite_inner,
    metric,
    project,
    raise_components,
    sector_inner,
)

e = CartanVector.basis


class TestInnerProducts:
    def test_hilbert_examples(self):
        assert hilbert_inner(e(0), e(0)) == 1
        assert hilbert_inner(e(0), e(2)) == 0
        x = CartanVector([1, 1j, 0, 0])
        assert hilbert_inner(x, x) == 2

    def test_indefinite_examples(self):
        assert indefinite_inner(e(0), e(0)) == 1
        assert indefinite_inner(e(2), e(2)) == -1
        assert indefinite_inner(CartanVector([1, 0, 1, 0]), CartanVector([1, 0, -1, 0])) == 2

    @given(complex_arrays(4), complex_arrays(4))
    def test_against_explicit_sums(self, x, y):
        cx, cy = CartanVector(x), CartanVector(y)
        assert abs(indefinite_inner(cx, cy) - oracle.g_inner4(x, y)) < 1e-9
        assert abs(hilbert_inner(cx, cy) - oracle.hilbert_inner4(x, y)) < 1e-9

    @given(complex_arrays(4), complex_arrays(4))
    def test_hermitian_symmetry(self, x, y):
        cx, cy = CartanVector(x), CartanVector(y)
        assert abs(indefinite_inner(cx, cy) - np.conj(indefinite_inner(cy, cx))) < 1e-9

    @given(complex_arrays(4), complex_arrays(4))
    def test_indefinite_is_hilbert_with_metric(self, x, y):
        cx, cy = CartanVector(x), CartanVector(y)
        assert abs(indefinite_inner(cx, cy) - hilbert_inner(cx, apply_metric(cy))) < 1e-9

    @given(complex_arrays(4))
    def test_hilbert_positive(self, x):
        v = hilbert_inner(CartanVector(x), CartanVector(x))
        assert v.real >= 0 and abs(v.imag) < 1e-12


class TestMetric:
    def test_apply_metric_examples(self):
        assert apply_metric(CartanVector([1, 2, 3, 4])) == CartanVector([1, 2, -3, -4])
        assert apply_metric(CartanVector([0, 0, 0, 0])) == CartanVector([0, 0, 0, 0])

    @given(complex_arrays(4))
    def test_involution(self, x):
        assert apply_metric(apply_metric(CartanVector(x))) == CartanVector(x)

    def test_metric_matrices(self):
        g = metric("g")
        assert np.array_equal(g @ g, np.eye(4))
        assert np.array_equal(metric("delta"), np.eye(4))
        with pytest.raises(ValueError):
            metric("minkowski")


class TestSectors:
    def test_project_examples(self):
        x = CartanVector([1, 2, 3, 4])
        assert project(x, Sector.PLUS) == SectorVector("+", [1, 2])
        assert project(x, Sector.MINUS) == SectorVector("-", [3, 4])

    @given(complex_arrays(4))
    def test_split_is_exact(self, x):
        cx = CartanVector(x)
        assert embed(project(cx, "+")) + embed(project(cx, "-")) == cx

    @given(complex_arrays(2))
    def test_project_embed_section(self, v):
        for s in Sector:
            sv = SectorVector(s, v)
            assert project(embed(sv), s) == sv

    def test_sector_inner_examples(self):
        assert sector_inner(SectorVector("+", [1, 0]), SectorVector("+", [1, 0])) == 1
        assert sector_inner(SectorVector("-", [1, 0]), SectorVector("-", [1, 0])) == -1

    @given(complex_arrays(4), complex_arrays(4))
    def test_sector_sum(self, x, y):
        cx, cy = CartanVector(x), CartanVector(y)
        parts = sum(sector_inner(project(cx, s), project(cy, s)) for s in Sector)
        assert abs(indefinite_inner(cx, cy) - parts) < 1e-9

    def test_sector_mismatch(self):
        with pytest.raises(SectorMismatchError):
            sector_inner(SectorVector("+", [1, 0]), SectorVector("-", [1, 0]))
        with pytest.raises(SectorMismatchError):
            SectorVector("+", [1, 0]) + SectorVector("-", [1, 0])

    def test_hilbert_sector_inner_is_definite(self):
        v = SectorVector("-", [1, 1j])
        assert hilbert_sector_inner(v, v) == 2

    def test_parse(self):
        assert Sector.parse("plus") is Sector.PLUS
        assert Sector.parse("-") is Sector.MINUS
        assert Sector.MINUS.other is Sector.PLUS
        with pytest.raises(ValueError):
            Sector.parse("0")


class TestAdjointComponents:
    def test_examples(self):
        a, b = 2 + 1j, -3j
        assert np.array_equal(adjoint_components(SectorVector("+", [a, b])), [a, b])
        assert np.array_equal(adjoint_components(SectorVector("-", [a, b])), [-a, -b])

    @given(complex_arrays(2), complex_arrays(2))
    def test_reflexive(self, x, y):
        for s in Sector:
            xs, ys = SectorVector(s, x), SectorVector(s, y)
            low = adjoint_sector_inner(adjoint_components(xs), adjoint_components(ys), s)
            assert abs(low - sector_inner(xs, ys)) < 1e-9
            assert raise_components(adjoint_components(xs), s) == xs


class TestValidation:
    @pytest.mark.parametrize("bad", [np.nan, np.inf, complex(0, np.inf)])
    def test_non_finite_rejected(self, bad):
        with pytest.raises(ValueError):
            CartanVector([bad, 0, 0, 0])
        with pytest.raises(ValueError):
            SectorVector("+", [0, bad])

    def test_shape_checked(self):
        with pytest.raises(ValueError):
            CartanVector([1, 2, 3])

    def test_immutable(self):
        x = CartanVector([1, 2, 3, 4])
        with pytest.raises(ValueError):
            x.components[0] = 5

    def test_metric_constant(self):
        assert np.array_equal(np.diag(G), [1, 1, -1, -1])
