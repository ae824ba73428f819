import math

import numpy as np
import pytest
from scipy import integrate

from z3ro import (
    ArrayGeometry,
    IdealPa,
    LinkBudget,
    RappPa,
    SeededRng,
    backoff_sweep,
    bussgang_monte_carlo,
    db_from_linear,
    los_ula_channel,
    mrt_weights,
    snr_mrt,
    third_order_analytic_metrics,
    z3ro_los_weights,
)

THETA = np.deg2rad(80.0)


def los_setup(m=8, p=0.5, noise=1.0):
    geo = ArrayGeometry(m, 0.5)
    channel = los_ula_channel(geo, THETA)
    budget = LinkBudget(symbol_power=p, noise_power=noise)
    return geo, channel, budget


class TestMonteCarlo:
    def test_ideal_pa_recovers_linear_snr(self):
        _, channel, budget = los_setup()
        w = mrt_weights(channel)
        report = bussgang_monte_carlo(channel, w, IdealPa(), budget, n=10**5, rng=SeededRng(1))
        expected = snr_mrt(channel, budget)
        # the Bussgang gain is itself sample-estimated, so allow MC noise
        assert report.snr_db == pytest.approx(db_from_linear(expected), abs=0.03)
        assert report.sdr_db >= 60.0
        assert report.sndr_db == pytest.approx(report.snr_db, abs=0.05)

    def test_matches_analytic_third_order(self):
        configs = [
            (8, -0.05 + 0.0j, "mrt"),
            (16, -0.08 + 0.03j, "mrt"),
            (16, -0.05 + 0.0j, "z3ro"),
        ]
        for m, a3, label in configs:
            geo, channel, budget = los_setup(m=m, p=0.3)
            if label == "mrt":
                w = mrt_weights(channel)
            else:
                w = z3ro_los_weights(geo, THETA, num_saturated=2)
            from z3ro import ThirdOrderPa

            mc = bussgang_monte_carlo(
                channel, w, ThirdOrderPa(a3), budget, n=10**6, rng=SeededRng(42)
            )
            exact = third_order_analytic_metrics(channel, w, a3, budget)
            assert mc.snr_db == pytest.approx(exact.snr_db, abs=0.1)
            if math.isfinite(exact.sdr_db):
                assert mc.sdr_db == pytest.approx(exact.sdr_db, abs=0.1)

    def test_bitwise_deterministic(self):
        _, channel, budget = los_setup()
        w = mrt_weights(channel)
        pa = RappPa(saturation_power=0.5)
        kw = dict(n=10**5, rng=SeededRng(9, 4))
        a = bussgang_monte_carlo(channel, w, pa, budget, **kw)
        b = bussgang_monte_carlo(channel, w, pa, budget, **kw)
        assert a == b

    def test_stderr_shrinks_with_samples(self):
        _, channel, budget = los_setup()
        w = mrt_weights(channel)
        pa = RappPa(saturation_power=0.5)
        small = bussgang_monte_carlo(channel, w, pa, budget, n=10**5, rng=SeededRng(3))
        large = bussgang_monte_carlo(channel, w, pa, budget, n=4 * 10**5, rng=SeededRng(3))
        # 4x the samples should roughly halve the standard error
        assert large.standard_error_db == pytest.approx(small.standard_error_db / 2, rel=0.3)

    def test_sample_floor_enforced(self):
        _, channel, budget = los_setup()
        with pytest.raises(ValueError):
            bussgang_monte_carlo(channel, mrt_weights(channel), IdealPa(), budget, n=100)

    def test_dimension_mismatch(self):
        _, channel, budget = los_setup(m=8)
        _, other, _ = los_setup(m=4)
        with pytest.raises(ValueError):
            bussgang_monte_carlo(channel, mrt_weights(other), IdealPa(), budget)

    def test_rapp_mrt_matches_quadrature(self):
        """Cross-check the MC estimator against 1-D quadrature.

        For an LOS channel with MRT weights every per-antenna input has the
        same magnitude, so r = M alpha beta s g(alpha^2 beta |s|^2) and the
        Bussgang moments reduce to integrals over the Exp(p) power density.
        """
        m = 16
        geo, channel, budget = los_setup(m=m, p=0.2)
        p = budget.symbol_power
        w = mrt_weights(channel)
        alpha = abs(w.weights[0])
        psat = 0.4 * p * alpha**2
        pa = RappPa(saturation_power=psat, smoothness=2.0)

        def g(q):  # per-antenna AM/AM scale at symbol power q
            return (1.0 + (alpha**2 * q / psat) ** 2) ** (-0.25)

        density = lambda q: np.exp(-q / p) / p
        e_qg = integrate.quad(lambda q: q * g(q) * density(q), 0, np.inf)[0]
        e_qg2 = integrate.quad(lambda q: q * g(q) ** 2 * density(q), 0, np.inf)[0]
        scale = m * alpha  # |sum_m h_m w_m| / alpha... = M alpha beta with beta=1
        gain = scale * e_qg / p
        dist = scale**2 * e_qg2 - gain**2 * p

        mc = bussgang_monte_carlo(channel, w, pa, budget, n=10**6, rng=SeededRng(7))
        assert abs(mc.bussgang_gain) == pytest.approx(gain, rel=1e-3)
        assert db_from_linear(mc.distortion_power) == pytest.approx(
            db_from_linear(dist), abs=0.05
        )


class TestAnalytic:
    def test_z3ro_has_infinite_sdr(self):
        geo, channel, budget = los_setup(m=32)
        w = z3ro_los_weights(geo, THETA, num_saturated=4)
        report = third_order_analytic_metrics(channel, w, -0.1, budget)
        assert report.distortion_power == 0.0
        assert report.sdr_db == math.inf
        assert report.sndr_db == report.snr_db

    def test_ideal_limit(self):
        _, channel, budget = los_setup()
        w = mrt_weights(channel)
        report = third_order_analytic_metrics(channel, w, 0.0, budget)
        assert report.snr_linear == pytest.approx(snr_mrt(channel, budget), rel=1e-12)
        assert report.sdr_linear == math.inf

    def test_sndr_composition(self):
        _, channel, budget = los_setup()
        w = mrt_weights(channel)
        report = third_order_analytic_metrics(channel, w, -0.2 + 0.1j, budget)
        combined = 1.0 / (1.0 / report.snr_linear + 1.0 / report.sdr_linear)
        assert report.sndr_linear == pytest.approx(combined, rel=1e-12)
        assert report.sndr_db < min(report.snr_db, report.sdr_db)


class TestBackoffSweep:
    def test_ideal_short_circuit(self):
        rows = backoff_sweep(
            ArrayGeometry(8, 0.5),
            THETA,
            num_saturated=1,
            backoffs_db=[-4.0, 0.0],
            pa_kind="ideal",
        )
        assert [r.precoder for r in rows] == ["mrt", "z3ro", "mrt", "z3ro"]
        assert all(r.report.sdr_db == math.inf for r in rows)
        mrt_rows = [r for r in rows if r.precoder == "mrt"]
        assert mrt_rows[0].report.snr_db == pytest.approx(mrt_rows[1].report.snr_db)

    def test_mrt_outgains_z3ro_without_distortion(self):
        rows = backoff_sweep(
            ArrayGeometry(16, 0.5), THETA, 2, backoffs_db=[0.0], pa_kind="ideal"
        )
        mrt, z3ro = rows
        assert mrt.report.snr_db > z3ro.report.snr_db

    def test_rejects_unknown_pa(self):
        with pytest.raises(ValueError):
            backoff_sweep(ArrayGeometry(8, 0.5), THETA, 1, [0.0], pa_kind="poly3")

    def test_deep_backoff_is_nearly_linear(self):
        rows = backoff_sweep(
            ArrayGeometry(8, 0.5),
            THETA,
            1,
            backoffs_db=[-30.0],
            n=10**4,
            rng=SeededRng(5),
        )
        ideal = backoff_sweep(
            ArrayGeometry(8, 0.5), THETA, 1, backoffs_db=[-30.0], pa_kind="ideal"
        )
        for got, ref in zip(rows, ideal):
            assert got.report.sndr_db == pytest.approx(ref.report.sndr_db, abs=0.2)
