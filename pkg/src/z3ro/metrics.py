"""Bussgang-decomposition link metrics: linear gain G, distortion power and
SNR/SDR/SNDR, estimated by Monte Carlo for any PA model and in closed form
for the third-order PA.

The received noiseless sample is r = sum_m h_m * pa(w_m * s). The Bussgang
gain is G = E(r s*)/p and the distortion power is the residual power
E|r - G s|^2; receiver noise is accounted for analytically (never sampled),
so 1/SNDR = 1/SNR + 1/SDR holds exactly by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    ArrayGeometry,
    LinkBudget,
    PrecoderWeights,
    SeededRng,
    gaussian_symbols,
    linear_from_db,
)
from .pa import PaModel, RappPa
from .precoding import _as_gains, mrt_weights, z3ro_los_weights

__all__ = [
    "MetricsReport",
    "bussgang_monte_carlo",
    "third_order_analytic_metrics",
    "backoff_sweep",
    "SweepRow",
]

_CHUNK = 1 << 15

# |B| below this fraction of the term-magnitude budget is cancellation
# residue of a designed null; the distortion is exactly zero then.
_NULL_CLAMP_REL = 1e-12


@dataclass(frozen=True)
class MetricsReport:
    """Link metrics from a Bussgang decomposition r = G s + d + v."""

    bussgang_gain: complex
    signal_power: float
    distortion_power: float
    noise_power: float
    sample_count: int = 0
    standard_error_db: float = 0.0
    clamped: bool = False

    @property
    def snr_linear(self):
        return self.signal_power / self.noise_power

    @property
    def sdr_linear(self):
        if self.distortion_power == 0.0:
            return math.inf
        return self.signal_power / self.distortion_power

    @property
    def sndr_linear(self):
        return 1.0 / (1.0 / self.snr_linear + 1.0 / self.sdr_linear)

    @property
    def snr_db(self):
        return 10.0 * math.log10(self.snr_linear)

    @property
    def sdr_db(self):
        return math.inf if self.sdr_linear == math.inf else 10.0 * math.log10(self.sdr_linear)

    @property
    def sndr_db(self):
        return 10.0 * math.log10(self.sndr_linear)


def _report(gain, signal, dist, noise, n, stderr_db):
    clamped = dist < 0.0
    if clamped:
        dist = 0.0
    return MetricsReport(
        bussgang_gain=complex(gain),
        signal_power=float(signal),
        distortion_power=float(dist),
        noise_power=float(noise),
        sample_count=int(n),
        standard_error_db=float(stderr_db),
        clamped=bool(clamped),
    )


def bussgang_monte_carlo(
    h,
    w: PrecoderWeights,
    pa: PaModel,
    budget: LinkBudget,
    n: int = 10**6,
    rng: SeededRng = SeededRng(0),
) -> MetricsReport:
    """Estimate the Bussgang metrics from `n` Gaussian symbols.

    Sampling is partitioned into fixed-size chunks with a derived RNG
    sub-stream per chunk and the partial sums are combined in chunk order,
    so the result is identical regardless of how the chunks are scheduled.
    """
    if n < 10**4:
        raise ValueError(f"n >= 1e4 samples required for stable estimates, got {n}")
    gains = _as_gains(h)
    weights = w.weights
    if gains.size != weights.size:
        raise ValueError("channel / weights dimension mismatch")
    p = budget.symbol_power

    num_chunks = (n + _CHUNK - 1) // _CHUNK
    part = np.zeros((num_chunks, 4))  # count, sum|r|^2, Re/Im of sum(r s*)
    part_rs = np.zeros(num_chunks, dtype=complex)
    part_ss = np.zeros(num_chunks)
    drawn = 0
    for i in range(num_chunks):
        size = min(_CHUNK, n - drawn)
        drawn += size
        s = gaussian_symbols(rng, p, size, generator=rng.substream(i))
        y = pa.amplify(s[:, None] * weights[None, :])
        if not np.all(np.isfinite(y)):
            raise FloatingPointError("non-finite PA output encountered")
        r = y @ gains
        part[i, 0] = size
        part[i, 1] = np.sum(np.abs(r) ** 2)
        part_rs[i] = np.sum(r * np.conj(s))
        part_ss[i] = np.sum(np.abs(s) ** 2)

    counts = part[:, 0]
    gain = np.sum(part_rs) / (n * p)
    m_rr = np.sum(part[:, 1]) / n
    m_rs = np.sum(part_rs) / n
    m_ss = np.sum(part_ss) / n
    # mean |r - G s|^2, assembled from the accumulated moments
    dist = m_rr - 2.0 * np.real(np.conj(gain) * m_rs) + np.abs(gain) ** 2 * m_ss
    signal = np.abs(gain) ** 2 * p

    # batch-means standard error of the distortion power, mapped to dB on SDR
    chunk_dist = (
        part[:, 1] / counts
        - 2.0 * np.real(np.conj(gain) * part_rs / counts)
        + np.abs(gain) ** 2 * part_ss / counts
    )
    if num_chunks > 1:
        stderr = float(np.std(chunk_dist, ddof=1) / np.sqrt(num_chunks))
    else:
        stderr = 0.0
    stderr_db = (10.0 / np.log(10.0)) * stderr / dist if dist > 0 else 0.0

    return _report(gain, signal, dist, budget.noise_power, n, stderr_db)


def third_order_analytic_metrics(h, w: PrecoderWeights, a3, budget: LinkBudget) -> MetricsReport:
    """Exact Bussgang metrics for the third-order PA under Gaussian symbols.

    With A = sum h_m w_m and B = a3 sum h_m w_m |w_m|^2:
    G = A + 2pB and E|d|^2 = 2 p^3 |B|^2.
    """
    gains = _as_gains(h)
    weights = w.weights
    if gains.size != weights.size:
        raise ValueError("channel / weights dimension mismatch")
    p = budget.symbol_power
    a_sum = complex(np.sum(gains * weights))
    cubic = gains * weights * np.abs(weights) ** 2
    b_raw = complex(np.sum(cubic))
    budget_mag = float(np.sum(np.abs(cubic)))
    if abs(b_raw) <= _NULL_CLAMP_REL * budget_mag:
        b_raw = 0.0
    b_sum = complex(a3) * b_raw
    gain = a_sum + 2.0 * p * b_sum
    dist = 2.0 * p**3 * abs(b_sum) ** 2
    signal = abs(gain) ** 2 * p
    return _report(gain, signal, dist, budget.noise_power, 0, 0.0)


@dataclass(frozen=True)
class SweepRow:
    backoff_db: float
    precoder: str
    report: MetricsReport


def backoff_sweep(
    geometry: ArrayGeometry,
    user_angle: float,
    num_saturated: int,
    backoffs_db,
    array_snr_db: float = 26.0,
    smoothness: float = 2.0,
    path_loss: float = 1.0,
    n: int = 10**6,
    rng: SeededRng = SeededRng(0),
    pa_kind: str = "rapp",
):
    """SNR/SDR/SNDR of MRT and Z3RO across PA back-off values.

    The symbol power p is pinned by the constraint M^2*beta*p/sigma_v^2 =
    `array_snr_db` (noise power fixed to 1) and the Rapp saturation power is
    swept as p_sat = p / backoff. `pa_kind` = "ideal" short-circuits to the
    exact linear metrics (a3 = 0), mainly for smoke tests.
    """
    from .channels import los_ula_channel

    if pa_kind not in ("rapp", "ideal"):
        raise ValueError(f"backoff_sweep supports 'rapp' or 'ideal' PAs, got {pa_kind!r}")
    m = geometry.num_antennas
    noise_power = 1.0
    p = linear_from_db(array_snr_db) * noise_power / (m**2 * path_loss)
    budget = LinkBudget(symbol_power=p, noise_power=noise_power, path_loss=path_loss)
    channel = los_ula_channel(geometry, user_angle, path_loss)
    precoders = [
        ("mrt", mrt_weights(channel)),
        ("z3ro", z3ro_los_weights(geometry, user_angle, path_loss, num_saturated)),
    ]
    rows = []
    for k, backoff_db in enumerate(backoffs_db):
        for j, (label, weights) in enumerate(precoders):
            if pa_kind == "ideal":
                report = third_order_analytic_metrics(channel, weights, 0.0, budget)
            else:
                psat = p / linear_from_db(backoff_db)
                pa = RappPa(saturation_power=psat, smoothness=smoothness)
                point_rng = SeededRng(rng.seed, rng.stream_id + 1 + 2 * k + j)
                report = bussgang_monte_carlo(channel, weights, pa, budget, n=n, rng=point_rng)
            rows.append(SweepRow(backoff_db=float(backoff_db), precoder=label, report=report))
    return rows
