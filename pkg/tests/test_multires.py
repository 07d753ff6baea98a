import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from pansharp.multires import (
    Kernel2D,
    PcaModel,
    WaveletStack,
    atrous_decompose,
    atrous_reconstruct,
    convolve2d,
    mallat_decompose,
    mallat_reconstruct,
    pca_forward,
    pca_inverse,
)
from pansharp.raster import MultiBandImage, Raster

from reference import B3_TAPS, dilate_taps, outer, ref_correlate


class TestKernel2D:
    def test_rejects_even_dims(self):
        with pytest.raises(ValueError):
            Kernel2D(np.ones((2, 3)))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            Kernel2D([[np.nan]])

    def test_laplacian_is_zero_sum(self):
        assert Kernel2D.laplacian8().taps.sum() == 0.0


class TestConvolve2d:
    def test_identity_kernel(self):
        rng = np.random.default_rng(0)
        r = Raster(rng.random((5, 6)))
        out = convolve2d(r, Kernel2D.identity())
        assert out == r

    def test_zero_sum_kernel_kills_constant(self):
        out = convolve2d(Raster(np.full((4, 4), 5.0)), Kernel2D.laplacian8())
        assert_allclose(out.data, 0.0, atol=1e-12)

    @pytest.mark.parametrize("boundary", ["replicate", "symmetric"])
    def test_matches_quadruple_loop(self, boundary):
        rng = np.random.default_rng(1)
        a = rng.random((6, 6)) * 10
        taps = rng.standard_normal((3, 3))
        got = convolve2d(Raster(a), Kernel2D(taps), boundary).data
        assert_allclose(got, ref_correlate(a, taps, boundary), atol=1e-12)

    def test_wide_kernel_boundary_semantics(self):
        # 5x5 kernels reach two samples past the edge, where replicate and
        # symmetric genuinely differ.
        rng = np.random.default_rng(2)
        a = rng.random((7, 5)) * 4
        taps = rng.standard_normal((5, 5))
        for boundary in ("replicate", "symmetric"):
            got = convolve2d(Raster(a), Kernel2D(taps), boundary).data
            assert_allclose(got, ref_correlate(a, taps, boundary), atol=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(
        alpha=st.floats(-3, 3),
        beta=st.floats(-3, 3),
        seed=st.integers(0, 1000),
    )
    def test_linearity(self, alpha, beta, seed):
        rng = np.random.default_rng(seed)
        x = rng.random((5, 5))
        y = rng.random((5, 5))
        k = Kernel2D(rng.standard_normal((3, 3)))
        lhs = convolve2d(Raster(alpha * x + beta * y), k).data
        rhs = alpha * convolve2d(Raster(x), k).data + beta * convolve2d(Raster(y), k).data
        assert_allclose(lhs, rhs, atol=1e-10)

    def test_unknown_boundary(self):
        with pytest.raises(ValueError):
            convolve2d(Raster([[1.0]]), Kernel2D.identity(), "wrap")


class TestAtrous:
    def test_constant_input(self):
        s = atrous_decompose(Raster(np.full((8, 8), 4.5)), 2)
        assert s.scheme == "atrous" and s.levels == 2
        for p in s.detail_planes:
            assert_allclose(p.data, 0.0, atol=1e-12)
        assert_allclose(s.residual.data, 4.5, atol=1e-12)

    @pytest.mark.parametrize("levels", [1, 2, 3])
    def test_telescoping_sum(self, levels):
        rng = np.random.default_rng(3)
        a = rng.random((16, 16)) * 100
        s = atrous_decompose(Raster(a), levels)
        total = sum(p.data for p in s.detail_planes) + s.residual.data
        assert_allclose(total, a, atol=1e-10)

    def test_impulse_level_one_matches_direct_kernel(self):
        a = np.zeros((17, 17))
        a[8, 8] = 1.0
        s = atrous_decompose(Raster(a), 1)
        smoothed = ref_correlate(a, outer(B3_TAPS, B3_TAPS), "symmetric")
        assert_allclose(s.detail_planes[0].data, a - np.asarray(smoothed), atol=1e-12)

    def test_level_two_uses_dilated_kernel(self):
        rng = np.random.default_rng(4)
        a = rng.random((12, 12))
        s = atrous_decompose(Raster(a), 2)
        k0 = outer(B3_TAPS, B3_TAPS)
        smooth1 = np.asarray(ref_correlate(a, k0, "symmetric"))
        t1 = dilate_taps(B3_TAPS, 2)
        smooth2 = np.asarray(ref_correlate(smooth1, outer(t1, t1), "symmetric"))
        assert_allclose(s.detail_planes[1].data, smooth1 - smooth2, atol=1e-12)
        assert_allclose(s.residual.data, smooth2, atol=1e-12)

    @pytest.mark.parametrize("levels", [1, 2, 3])
    def test_reconstruct_inverts(self, levels):
        rng = np.random.default_rng(5)
        a = rng.random((16, 16)) * 50
        s = atrous_decompose(Raster(a), levels)
        assert_allclose(atrous_reconstruct(s).data, a, atol=1e-10)

    def test_reconstruct_zero_planes_gives_residual(self):
        q = np.arange(16.0).reshape(4, 4)
        s = WaveletStack((Raster(np.zeros((4, 4))),), Raster(q), "atrous")
        assert np.array_equal(atrous_reconstruct(s).data, q)

    def test_reconstruct_is_sum_by_definition(self):
        p = np.arange(16.0).reshape(4, 4)
        q = np.ones((4, 4))
        s = WaveletStack((Raster(p),), Raster(q), "atrous")
        assert np.array_equal(atrous_reconstruct(s).data, p + q)

    def test_scheme_mismatch(self):
        rng = np.random.default_rng(6)
        s = mallat_decompose(Raster(rng.random((4, 4))), 1)
        with pytest.raises(ValueError):
            atrous_reconstruct(s)

    def test_bad_levels(self):
        with pytest.raises(ValueError):
            atrous_decompose(Raster(np.zeros((4, 4))), 0)


class TestMallat:
    def test_constant_kills_details(self):
        a = np.full((4, 4), 3.0)
        s = mallat_decompose(Raster(a), 1)
        for p in s.detail_planes:
            assert_allclose(p.data, 0.0, atol=1e-12)
        # orthonormal 2-D Haar scales constants by 2 per level
        assert_allclose(s.residual.data, 6.0, atol=1e-12)

    def test_parseval(self):
        rng = np.random.default_rng(7)
        a = rng.random((8, 8))
        s = mallat_decompose(Raster(a), 2)
        energy = sum(float((p.data**2).sum()) for p in s.detail_planes)
        energy += float((s.residual.data**2).sum())
        assert abs(energy - float((a**2).sum())) < 1e-9

    @pytest.mark.parametrize("levels", [1, 2, 3])
    def test_round_trip(self, levels):
        rng = np.random.default_rng(8)
        a = rng.random((8, 8)) * 20
        back = mallat_reconstruct(mallat_decompose(Raster(a), levels))
        assert_allclose(back.data, a, atol=1e-10)

    def test_matches_matrix_form(self):
        # One level as matrices: LL = A a A^T, LH = A a D^T, HL = D a A^T,
        # HH = D a D^T with pairwise averaging/differencing rows.
        rng = np.random.default_rng(9)
        a = rng.random((8, 8))
        n = 8
        avg = np.zeros((n // 2, n))
        dif = np.zeros((n // 2, n))
        for i in range(n // 2):
            avg[i, 2 * i] = avg[i, 2 * i + 1] = 1 / np.sqrt(2)
            dif[i, 2 * i], dif[i, 2 * i + 1] = 1 / np.sqrt(2), -1 / np.sqrt(2)
        s = mallat_decompose(Raster(a), 1)
        lh, hl, hh = (p.data for p in s.detail_planes)
        assert_allclose(s.residual.data, avg @ a @ avg.T, atol=1e-12)
        assert_allclose(lh, avg @ a @ dif.T, atol=1e-12)
        assert_allclose(hl, dif @ a @ avg.T, atol=1e-12)
        assert_allclose(hh, dif @ a @ dif.T, atol=1e-12)

    def test_sub_band_shapes(self):
        s = mallat_decompose(Raster(np.zeros((8, 8))), 2)
        assert s.levels == 2
        shapes = [(p.height, p.width) for p in s.detail_planes]
        assert shapes == [(4, 4)] * 3 + [(2, 2)] * 3
        assert (s.residual.height, s.residual.width) == (2, 2)

    def test_divisibility_required(self):
        with pytest.raises(ValueError):
            mallat_decompose(Raster(np.zeros((6, 6))), 2)


class TestPca:
    def test_identical_bands(self):
        rng = np.random.default_rng(10)
        b = rng.random((6, 6)) * 3
        comps, model = pca_forward(MultiBandImage.from_stack(np.stack([b, b])))
        var = b.var()
        assert_allclose(model.eigenvalues, [2 * var, 0.0], atol=1e-12)
        assert_allclose(comps.bands[0].data, np.sqrt(2) * (b - b.mean()), atol=1e-9)

    def test_uncorrelated_bands_diagonal_covariance(self):
        z0 = np.array([[1.0, -1.0], [1.0, -1.0]])
        z1 = np.array([[1.0, 1.0], [-1.0, -1.0]])
        img = MultiBandImage.from_stack(np.stack([2 * z0 + 5, z1 - 1]))
        comps, model = pca_forward(img)
        assert_allclose(model.eigenvalues, [4.0, 1.0], atol=1e-12)
        assert_allclose(model.basis, np.eye(2), atol=1e-10)
        assert_allclose(comps.bands[0].data, 2 * z0, atol=1e-10)

    def test_round_trip(self):
        rng = np.random.default_rng(11)
        img = MultiBandImage.from_stack(rng.random((4, 8, 8)) * 40)
        comps, model = pca_forward(img)
        back = pca_inverse(comps, model)
        assert_allclose(back.to_stack(), img.to_stack(), atol=1e-9)

    def test_component_covariance_is_diagonal(self):
        rng = np.random.default_rng(12)
        img = MultiBandImage.from_stack(rng.random((3, 10, 10)))
        comps, model = pca_forward(img)
        flat = comps.to_stack().reshape(3, -1)
        cov = (flat @ flat.T) / flat.shape[1]
        off = cov - np.diag(np.diag(cov))
        assert np.abs(off).max() < 1e-9
        assert cov[0, 0] == max(np.diag(cov))

    def test_trace_preservation(self):
        rng = np.random.default_rng(13)
        img = MultiBandImage.from_stack(rng.random((4, 8, 8)) * 10)
        _, model = pca_forward(img)
        variances = [b.data.var() for b in img.bands]
        assert abs(model.eigenvalues.sum() - sum(variances)) < 1e-9

    def test_zero_components_reconstruct_means(self):
        rng = np.random.default_rng(14)
        img = MultiBandImage.from_stack(rng.random((3, 4, 4)))
        comps, model = pca_forward(img)
        zeros = MultiBandImage.from_stack(np.zeros_like(comps.to_stack()))
        back = pca_inverse(zeros, model)
        for band, mean in zip(back.bands, model.band_means):
            assert_allclose(band.data, mean, atol=1e-12)

    def test_scaling_component_zero_moves_along_first_direction(self):
        rng = np.random.default_rng(15)
        img = MultiBandImage.from_stack(rng.random((3, 5, 5)))
        comps, model = pca_forward(img)
        scaled = comps.to_stack()
        scaled[0] *= 2.0
        back = pca_inverse(MultiBandImage.from_stack(scaled), model)
        diff = back.to_stack() - img.to_stack()
        expected = model.basis[0][:, None, None] * comps.bands[0].data[None]
        assert_allclose(diff, expected, atol=1e-9)

    def test_sign_convention(self):
        rng = np.random.default_rng(16)
        img = MultiBandImage.from_stack(rng.random((3, 6, 6)))
        _, model = pca_forward(img)
        for row in model.basis:
            s = row.sum()
            assert s > -1e-12
            if abs(s) <= 1e-12:
                nz = row[np.abs(row) > 1e-12]
                assert nz[0] > 0

    def test_all_constant_rejected(self):
        img = MultiBandImage.from_stack(np.full((2, 3, 3), 7.0))
        with pytest.raises(ValueError):
            pca_forward(img)

    def test_single_band_rejected(self):
        with pytest.raises(ValueError):
            pca_forward(MultiBandImage.from_stack(np.random.default_rng(0).random((1, 4, 4))))

    def test_inverse_band_count_mismatch(self):
        rng = np.random.default_rng(17)
        comps, model = pca_forward(MultiBandImage.from_stack(rng.random((3, 4, 4))))
        wrong = MultiBandImage.from_stack(rng.random((2, 4, 4)))
        with pytest.raises(ValueError):
            pca_inverse(wrong, model)

    def test_model_validation(self):
        with pytest.raises(ValueError):
            PcaModel(
                basis=np.array([[1.0, 1.0], [0.0, 1.0]]),  # not orthonormal
                band_means=np.zeros(2),
                eigenvalues=np.array([2.0, 1.0]),
            )
        with pytest.raises(ValueError):
            PcaModel(
                basis=np.eye(2),
                band_means=np.zeros(2),
                eigenvalues=np.array([1.0, 2.0]),  # ascending
            )


class TestWaveletStackValidation:
    def test_atrous_dims_must_match(self):
        with pytest.raises(ValueError):
            WaveletStack(
                (Raster(np.zeros((4, 4))),), Raster(np.zeros((2, 2))), "atrous"
            )

    def test_mallat_needs_triples(self):
        with pytest.raises(ValueError):
            WaveletStack(
                (Raster(np.zeros((2, 2))),) * 2, Raster(np.zeros((2, 2))), "mallat_haar"
            )

    def test_unknown_scheme(self):
        with pytest.raises(ValueError):
            WaveletStack((Raster(np.zeros((2, 2))),), Raster(np.zeros((2, 2))), "dct")
