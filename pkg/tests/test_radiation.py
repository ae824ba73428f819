import numpy as np
import pytest

from z3ro import (
    AngularGrid,
    ArrayGeometry,
    IdealPa,
    PrecoderWeights,
    RappPa,
    SeededRng,
    ThirdOrderPa,
    directivity,
    gaussian_symbols,
    mrt_weights,
    los_ula_channel,
    radiation_pattern,
    total_distortion_power,
    z3ro_los_weights,
)

THETA = np.deg2rad(80.0)
PA = ThirdOrderPa(a3=-0.1 + 0.05j)


def pattern_for(m, weights, pa=PA, p=1.0, grid=None, **kw):
    grid = grid or AngularGrid.uniform(4096)
    geo = ArrayGeometry(m, 0.5)
    return radiation_pattern(geo, weights, pa, p, grid, **kw), grid


class TestAngularGrid:
    def test_uniform_constructor(self):
        grid = AngularGrid.uniform(4096)
        assert grid.is_uniform and grid.spans_circle
        assert grid.angles[-1] == pytest.approx(np.pi)

    def test_validation(self):
        with pytest.raises(ValueError):
            AngularGrid(np.array([0.5, 0.4]))
        with pytest.raises(ValueError):
            AngularGrid(np.array([-4.0, 0.0]))
        with pytest.raises(ValueError):
            AngularGrid(np.array([]))


class TestRadiationPattern:
    def test_single_element_isotropic(self):
        p = 1.7
        pattern, grid = pattern_for(1, PrecoderWeights(np.array([1.0 + 0j])), IdealPa(), p)
        np.testing.assert_allclose(pattern.p_total, p, rtol=1e-12)
        directivity(pattern, grid)
        np.testing.assert_allclose(pattern.d_total, 1.0, rtol=1e-9)

    def test_mrt_linear_and_distortion_shapes_match(self):
        geo = ArrayGeometry(32, 0.5)
        w = mrt_weights(los_ula_channel(geo, THETA))
        pattern, grid = pattern_for(32, w)
        lin = pattern.p_linear / pattern.p_linear.max()
        dist = pattern.p_dist3 / pattern.p_dist3.max()
        np.testing.assert_allclose(lin, dist, atol=1e-9)

    def test_z3ro_null_at_user_angle(self):
        for m in (8, 32):
            w = z3ro_los_weights(ArrayGeometry(m, 0.5), THETA, num_saturated=1)
            at_user = radiation_pattern(
                ArrayGeometry(m, 0.5), w, PA, 1.0, AngularGrid(np.array([THETA]))
            )
            assert at_user.p_dist3[0] == 0.0
            assert at_user.p_linear[0] > 0.0

    def test_two_antenna_case_also_nulls_signal(self):
        with pytest.warns(UserWarning):
            w = z3ro_los_weights(ArrayGeometry(2, 0.5), THETA, num_saturated=1)
        at_user = radiation_pattern(
            ArrayGeometry(2, 0.5), w, PA, 1.0, AngularGrid(np.array([THETA]))
        )
        assert at_user.p_dist3[0] == 0.0
        assert at_user.p_linear[0] == 0.0

    def test_nonnegative_total(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            m = int(rng.integers(2, 33))
            w = rng.normal(size=m) + 1j * rng.normal(size=m)
            w *= np.sqrt(m / np.sum(np.abs(w) ** 2))
            pattern, _ = pattern_for(m, PrecoderWeights(w), ThirdOrderPa(-0.4 + 0.3j), p=1.5)
            assert np.all(pattern.p_total >= 0.0)

    def test_symmetry_in_angle(self):
        w = mrt_weights(los_ula_channel(ArrayGeometry(16, 0.5), THETA))
        grid = AngularGrid.uniform(4096)
        pattern, _ = pattern_for(16, w, grid=grid)
        # grid points at -pi + k*step pair up as P(a) == P(-a)
        flipped = pattern.p_total[::-1]
        np.testing.assert_allclose(pattern.p_total[:-1], flipped[1:], rtol=1e-9, atol=1e-12)

    def test_monte_carlo_agreement(self):
        m = 8
        geo = ArrayGeometry(m, 0.5)
        p = 0.8
        w = z3ro_los_weights(geo, THETA, num_saturated=2)
        angles = AngularGrid(np.linspace(-3.0, 3.0, 7))
        closed = radiation_pattern(geo, w, PA, p, angles)
        s = gaussian_symbols(SeededRng(2024), p, 10**6)
        y = PA.amplify(s[:, None] * w.weights[None, :])
        steer = np.exp(-1j * geo.phase_profile(angles.angles))  # (7, m)
        sampled = np.mean(np.abs(y @ steer.T) ** 2, axis=0)
        np.testing.assert_allclose(sampled, closed.p_total, rtol=0.01)

    def test_rapp_rejected(self):
        w = PrecoderWeights(np.ones(4, dtype=complex))
        with pytest.raises(TypeError):
            pattern_for(4, w, RappPa(1.0))

    def test_bussgang_split_keeps_total(self):
        geo = ArrayGeometry(16, 0.5)
        w = mrt_weights(los_ula_channel(geo, THETA))
        raw, grid = pattern_for(16, w, split="raw")
        buss, _ = pattern_for(16, w, split="bussgang")
        np.testing.assert_allclose(raw.p_total, buss.p_total, rtol=1e-12)
        assert not np.allclose(raw.p_linear, buss.p_linear)


class TestDirectivity:
    def test_scale_invariance(self):
        geo = ArrayGeometry(32, 0.5)
        w = mrt_weights(los_ula_channel(geo, THETA))
        grid = AngularGrid.uniform(4096)
        d1 = directivity(radiation_pattern(geo, w, IdealPa(), 1.0, grid), grid)
        d2 = directivity(radiation_pattern(geo, w, IdealPa(), 2.0, grid), grid)
        np.testing.assert_allclose(d1.d_total, d2.d_total, rtol=1e-12)

    def test_grid_refinement_consistency(self):
        geo = ArrayGeometry(32, 0.5)
        w = mrt_weights(los_ula_channel(geo, THETA))
        peaks = []
        for n in (4096, 65536):
            grid = AngularGrid.uniform(n)
            pattern = directivity(radiation_pattern(geo, w, IdealPa(), 1.0, grid), grid)
            peaks.append(pattern.d_total.max())
        assert peaks[0] == pytest.approx(peaks[1], rel=1e-3)

    def test_mean_directivity_is_one(self):
        geo = ArrayGeometry(32, 0.5)
        w = z3ro_los_weights(geo, THETA, num_saturated=4)
        grid = AngularGrid.uniform(4096)
        pattern = directivity(radiation_pattern(geo, w, PA, 1.0, grid), grid)
        assert np.mean(pattern.d_total) == pytest.approx(1.0, rel=1e-3)

    def test_grid_requirements(self):
        geo = ArrayGeometry(4, 0.5)
        w = PrecoderWeights(np.ones(4, dtype=complex))
        coarse = AngularGrid.uniform(128)
        pattern = radiation_pattern(geo, w, IdealPa(), 1.0, coarse)
        with pytest.raises(ValueError):
            directivity(pattern, coarse)
        partial = AngularGrid(np.linspace(-1.0, 1.0, 2048))
        pattern2 = radiation_pattern(geo, w, IdealPa(), 1.0, partial)
        with pytest.raises(ValueError):
            directivity(pattern2, partial)


class TestTotalDistortionPower:
    def test_ideal_pa_is_zero(self):
        geo = ArrayGeometry(8, 0.5)
        w = mrt_weights(los_ula_channel(geo, THETA))
        grid = AngularGrid.uniform(4096)
        pattern = radiation_pattern(geo, w, IdealPa(), 1.0, grid)
        assert total_distortion_power(pattern, grid) == 0.0

    def test_tradeoff_with_saturated_count(self):
        geo = ArrayGeometry(32, 0.5)
        grid = AngularGrid.uniform(4096)
        mrt = radiation_pattern(geo, mrt_weights(los_ula_channel(geo, THETA)), PA, 1.0, grid)
        totals = {
            ms: total_distortion_power(
                radiation_pattern(
                    geo, z3ro_los_weights(geo, THETA, num_saturated=ms), PA, 1.0, grid
                ),
                grid,
            )
            for ms in (1, 2, 4, 8)
        }
        assert totals[1] > total_distortion_power(mrt, grid)
        assert totals[1] > totals[2] > totals[4] > totals[8]
