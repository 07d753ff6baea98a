import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from pansharp.preprocess import downsample, histogram_match, upsample
from pansharp.raster import MultiBandImage, Raster

from reference import ref_box_mean


def _img(*planes):
    return MultiBandImage.from_stack(np.stack([np.asarray(p, float) for p in planes]))


class TestUpsample:
    @pytest.mark.parametrize("method", ["nearest", "bilinear", "bicubic"])
    def test_constant_stays_constant(self, method):
        out = upsample(_img(np.full((2, 2), 3.75)), 4, method)
        assert (out.height, out.width) == (8, 8)
        assert_allclose(out.bands[0].data, 3.75, rtol=0, atol=1e-12)

    @pytest.mark.parametrize("method", ["nearest", "bilinear", "bicubic"])
    def test_factor_one_is_identity(self, method):
        rng = np.random.default_rng(0)
        img = _img(rng.random((5, 7)))
        out = upsample(img, 1, method)
        assert np.array_equal(out.bands[0].data, img.bands[0].data)

    def test_bilinear_ramp_interior_on_line(self):
        # Input 1x4 ramp 0,1,2,3; output center j maps to x = j/2 - 0.25,
        # so interior outputs must equal x exactly (the ramp is y = x).
        out = upsample(_img([[0.0, 1.0, 2.0, 3.0]]), 2, "bilinear")
        row = out.bands[0].data[0]
        for j in range(1, 7):
            x = j / 2 - 0.25
            assert abs(row[j] - x) < 1e-12

    def test_bicubic_plane_interior_exact(self):
        y = np.arange(6)[:, None].astype(float)
        x = np.arange(6)[None, :].astype(float)
        plane = 2.0 + 0.5 * x - 1.25 * y
        out = upsample(_img(plane), 2, "bicubic").bands[0].data
        ys = (np.arange(12) + 0.5) / 2 - 0.5
        expected = 2.0 + 0.5 * ys[None, :] - 1.25 * ys[:, None]
        # bicubic needs a 4-tap interior: source coords within [1, n-2]
        inner = slice(3, 9)
        assert_allclose(out[inner, inner], expected[inner, inner], atol=1e-10)

    def test_nearest_is_block_replication(self):
        rng = np.random.default_rng(1)
        a = rng.random((3, 2))
        out = upsample(_img(a), 3, "nearest").bands[0].data
        assert np.array_equal(out, np.repeat(np.repeat(a, 3, 0), 3, 1))

    def test_rejects_bad_factor_and_method(self):
        img = _img(np.zeros((2, 2)))
        with pytest.raises(ValueError):
            upsample(img, 0)
        with pytest.raises(ValueError):
            upsample(img, 2.5)
        with pytest.raises(ValueError):
            upsample(img, 2, "lanczos")

    def test_per_band_independence(self):
        rng = np.random.default_rng(2)
        a, b = rng.random((2, 4, 4))
        up_ab = upsample(_img(a, b), 2, "bicubic")
        up_ba = upsample(_img(b, a), 2, "bicubic")
        assert up_ab.bands[0] == up_ba.bands[1]
        assert up_ab.bands[1] == up_ba.bands[0]


class TestDownsample:
    def test_block_means(self):
        a = np.array(
            [
                [1.0, 1.0, 2.0, 2.0],
                [1.0, 1.0, 2.0, 2.0],
                [3.0, 3.0, 4.0, 4.0],
                [3.0, 3.0, 4.0, 4.0],
            ]
        )
        out = downsample(_img(a), 2, "box_mean").bands[0].data
        assert np.array_equal(out, [[1.0, 2.0], [3.0, 4.0]])

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_decimate_inverts_nearest_upsample(self, k):
        rng = np.random.default_rng(k)
        img = _img(rng.random((4, 6)))
        there = upsample(img, k, "nearest")
        back = downsample(there, k, "decimate")
        assert back == img

    @pytest.mark.parametrize("k", [2, 3])
    def test_box_mean_matches_double_loop(self, k):
        rng = np.random.default_rng(11)
        a = rng.random((4 * k, 2 * k)) * 50
        out = downsample(_img(a), k, "box_mean").bands[0].data
        assert_allclose(out, ref_box_mean(a, k), rtol=1e-13, atol=1e-13)

    def test_box_mean_exact_on_constant_blocks(self):
        rng = np.random.default_rng(12)
        img = _img(rng.random((3, 5)))
        blocks = upsample(img, 4, "nearest")
        back = downsample(blocks, 4, "box_mean")
        assert back == img  # bit-exact for power-of-two factors

    def test_non_divisible_rejected(self):
        with pytest.raises(ValueError):
            downsample(_img(np.zeros((5, 4))), 2, "box_mean")

    def test_unknown_filter_rejected(self):
        with pytest.raises(ValueError):
            downsample(_img(np.zeros((4, 4))), 2, "gauss")

    @pytest.mark.parametrize("k", [2, 4])
    def test_bilinear_then_box_mean_preserves_mean(self, k):
        rng = np.random.default_rng(13)
        a = rng.random((8, 8)) * 100
        round_trip = downsample(upsample(_img(a), k, "bilinear"), k, "box_mean")
        assert abs(round_trip.bands[0].data.mean() - a.mean()) < 1e-9


class TestHistogramMatch:
    def test_identity(self):
        rng = np.random.default_rng(20)
        r = Raster(rng.random((5, 5)) * 10)
        out = histogram_match(r, r, "mean_std")
        assert_allclose(out.data, r.data, atol=1e-12)

    def test_affine_closed_form(self):
        out = histogram_match(Raster([[0.0, 2.0]]), Raster([[10.0, 30.0]]), "mean_std")
        assert np.array_equal(out.data, [[10.0, 30.0]])

    @pytest.mark.parametrize("mode", ["mean_std", "cdf"])
    def test_constant_to_constant(self, mode):
        out = histogram_match(
            Raster(np.full((2, 2), 5.0)), Raster(np.full((3, 3), -2.5)), mode
        )
        assert np.array_equal(out.data, np.full((2, 2), -2.5))

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_mean_std_statistics_exact(self, seed):
        rng = np.random.default_rng(seed)
        src = Raster(rng.random((6, 6)) * 20 - 5)
        ref = Raster(rng.random((4, 4)) * 7 + 1)
        out = histogram_match(src, ref, "mean_std")
        assert abs(out.data.mean() - ref.data.mean()) < 1e-12
        assert abs(out.data.std() - ref.data.std()) < 1e-12

    def test_degenerate_source_rejected(self):
        with pytest.raises(ValueError):
            histogram_match(
                Raster(np.full((2, 2), 1.0)), Raster([[0.0, 4.0]]), "mean_std"
            )

    def test_cdf_same_size_is_rank_mapping(self):
        rng = np.random.default_rng(21)
        src = rng.permutation(np.arange(16.0)).reshape(4, 4)
        ref = rng.standard_normal((4, 4))
        out = histogram_match(Raster(src), Raster(ref), "cdf")
        ref_sorted = np.sort(ref.ravel())
        expected = ref_sorted[np.argsort(np.argsort(src.ravel()))].reshape(4, 4)
        assert_allclose(out.data, expected, atol=1e-12)

    def test_cdf_identity_with_ties(self):
        src = Raster(np.array([[1.0, 1.0, 2.0], [3.0, 3.0, 3.0]]))
        out = histogram_match(src, src, "cdf")
        assert np.array_equal(out.data, src.data)

    def test_cdf_sorted_output_equals_ref_quantiles(self):
        rng = np.random.default_rng(22)
        src = Raster(rng.random((4, 4)))
        ref = Raster(rng.random((8, 8)) * 3 + 1)
        out = histogram_match(src, ref, "cdf")
        n = src.data.size
        ranks = (np.arange(n) + 0.5) / n
        ref_sorted = np.sort(ref.data.ravel())
        ref_q = (np.arange(ref_sorted.size) + 0.5) / ref_sorted.size
        expected = np.interp(ranks, ref_q, ref_sorted)
        assert_allclose(np.sort(out.data.ravel()), expected, atol=1e-12)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            histogram_match(Raster([[1.0]]), Raster([[2.0]]), "exact")
