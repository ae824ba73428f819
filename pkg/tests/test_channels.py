import numpy as np
import pytest

from z3ro import ArrayGeometry, SeededRng, iid_rayleigh_channel, los_ula_channel


class TestLosUla:
    def test_broadside_all_ones(self):
        ch = los_ula_channel(ArrayGeometry(2, 0.5), np.pi / 2)
        np.testing.assert_allclose(ch.gains, [1.0, 1.0], atol=1e-12)

    def test_near_endfire_alternates_sign(self):
        ch = los_ula_channel(ArrayGeometry(4, 0.5), 1e-9)
        np.testing.assert_allclose(ch.gains, [1, -1, 1, -1], atol=1e-6)

    def test_endfire_rejected(self):
        for theta in (0.0, np.pi, -0.1, 3.5):
            with pytest.raises(ValueError):
                los_ula_channel(ArrayGeometry(4), theta)

    def test_fig1_phase_slope(self):
        ch = los_ula_channel(ArrayGeometry(32, 0.5), np.deg2rad(80))
        phases = -np.angle(ch.gains[:6])  # h_m = exp(-j phi_m), small m before wrap
        np.testing.assert_allclose(
            np.diff(phases), 0.5455318392676838, atol=1e-12
        )

    def test_magnitude_is_sqrt_beta(self):
        beta = 3.7
        ch = los_ula_channel(ArrayGeometry(16), 1.0, beta)
        np.testing.assert_allclose(np.abs(ch.gains), np.sqrt(beta), rtol=1e-15)

    def test_phase_increment_constant(self):
        ch = los_ula_channel(ArrayGeometry(64, 0.7), 1.1)
        ratio = ch.gains[1:] / ch.gains[:-1]
        np.testing.assert_allclose(ratio, ratio[0], atol=1e-12)

    def test_path_loss_validation(self):
        with pytest.raises(ValueError):
            los_ula_channel(ArrayGeometry(4), 1.0, path_loss=0.0)


class TestRayleigh:
    def test_second_moment(self):
        beta = 0.8
        gains = np.concatenate(
            [iid_rayleigh_channel(10**5, beta, SeededRng(5, i)).gains for i in range(1)]
        )
        assert np.mean(np.abs(gains) ** 2) == pytest.approx(beta, rel=0.01)

    def test_deterministic(self):
        a = iid_rayleigh_channel(64, 1.0, SeededRng(11, 2))
        b = iid_rayleigh_channel(64, 1.0, SeededRng(11, 2))
        np.testing.assert_array_equal(a.gains, b.gains)

    def test_single_draw_law_of_large_numbers(self):
        ch = iid_rayleigh_channel(4096, 1.0, SeededRng(77))
        assert np.mean(np.abs(ch.gains) ** 2) == pytest.approx(1.0, rel=0.05)

    def test_validation(self):
        with pytest.raises(ValueError):
            iid_rayleigh_channel(0, 1.0, SeededRng(0))
