import numpy as np
import pytest

from fetalsep.errors import TooShortError
from fetalsep.wavelet import dwt_cdf97, idwt_cdf97

# published 9/7 analysis taps
H0 = np.array([
    0.026748757410810, -0.016864118442875, -0.078223266528990,
    0.266864118442875, 0.602949018236360, 0.266864118442875,
    -0.078223266528990, -0.016864118442875, 0.026748757410810,
])
H1 = np.array([
    0.091271763114250, -0.057543526228500, -0.591271763114250,
    1.115087052457000, -0.591271763114250, -0.057543526228500,
    0.091271763114250,
])


def conv_oracle_level(x):
    """One analysis level by explicit convolution with symmetric extension."""
    n = len(x)
    pad = 8
    ext = np.concatenate([x[1 : pad + 1][::-1], x, x[-pad - 1 : -1][::-1]])
    approx = np.array(
        [np.dot(H0, ext[pad + 2 * k - 4 : pad + 2 * k + 5]) for k in range((n + 1) // 2)]
    )
    detail = np.array(
        [np.dot(H1, ext[pad + 2 * k - 2 : pad + 2 * k + 5]) for k in range(n // 2)]
    )
    return approx, detail


def rel_rms(a, b):
    return np.sqrt(np.mean((a - b) ** 2)) / np.sqrt(np.mean(b**2))


class TestRoundTrip:
    @pytest.mark.parametrize("n", [64, 200, 256, 1000, 4096])
    def test_perfect_reconstruction(self, n):
        x = np.random.default_rng(n).normal(size=n)
        sb = dwt_cdf97(x, levels=5)
        assert rel_rms(idwt_cdf97(sb), x) < 1e-8

    @pytest.mark.parametrize("n", [37, 65, 127, 333])
    def test_odd_lengths_round_trip(self, n):
        x = np.random.default_rng(n).normal(size=n)
        sb = dwt_cdf97(x, levels=5)
        assert rel_rms(idwt_cdf97(sb), x) < 1e-8

    def test_critically_sampled(self):
        for n in (64, 200, 1000, 333):
            sb = dwt_cdf97(np.random.default_rng(1).normal(size=n), levels=5)
            assert sb.coeff_count == n

    def test_too_short(self):
        with pytest.raises(TooShortError):
            dwt_cdf97(np.zeros(31), levels=5)


class TestVanishingMoments:
    def test_constant_has_no_detail(self):
        sb = dwt_cdf97(np.full(256, 3.25), levels=5)
        for d in sb.details:
            assert np.max(np.abs(d)) < 1e-9
        np.testing.assert_allclose(sb.approx, 3.25, atol=1e-9)

    def test_linear_ramp_interior_detail_vanishes(self):
        sb = dwt_cdf97(np.linspace(0, 1, 512), levels=1)
        assert np.max(np.abs(sb.details[0][4:-4])) < 1e-12


class TestConvolutionOracle:
    @pytest.mark.parametrize("n", [64, 200, 255])
    def test_single_level_matches_published_taps(self, n):
        x = np.random.default_rng(7 + n).normal(size=n)
        sb = dwt_cdf97(x, levels=1)
        approx, detail = conv_oracle_level(x)
        np.testing.assert_allclose(sb.approx, approx, atol=1e-10)
        np.testing.assert_allclose(sb.details[0], detail, atol=1e-10)

    def test_multilevel_matches_cascaded_oracle(self):
        x = np.random.default_rng(3).normal(size=256)
        sb = dwt_cdf97(x, levels=3)
        cur = x
        for lvl in range(3):
            cur, detail = conv_oracle_level(cur)
            np.testing.assert_allclose(sb.details[lvl], detail, atol=1e-9)
        np.testing.assert_allclose(sb.approx, cur, atol=1e-9)
