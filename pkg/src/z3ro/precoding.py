"""Precoder weight synthesis and closed-form link SNRs.

Implements maximum ratio transmission (MRT) and the Z3RO family, which
saturates ``num_saturated`` antennas with an opposite phase shift so that
the third-order distortion sum ``sum_m h_m w_m |w_m|^2`` is null at the
user. Both a functional API and sklearn-style estimators are provided.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .channels import ChannelRealization
from .core import ArrayGeometry, LinkBudget, PrecoderWeights
from .pa import IdealPa, PaModel, ThirdOrderPa, third_order_split

__all__ = [
    "mrt_weights",
    "z3ro_los_weights",
    "z3ro_weights",
    "zero_distortion_residual",
    "snr_mrt",
    "z3ro_snr",
    "received_signal",
    "ReceivedSample",
    "saturated_indices",
    "MrtPrecoder",
    "Z3roPrecoder",
]

SELECTIONS = ("first", "strongest", "weakest")


def _as_gains(h):
    if isinstance(h, ChannelRealization):
        return h.gains
    gains = np.asarray(h, dtype=complex)
    if gains.ndim != 1 or gains.size == 0:
        raise ValueError("channel must be a nonempty 1-D complex vector")
    return gains


def saturated_indices(gains, num_saturated, selection="first", indices=None):
    """Resolve the saturated antenna subset for a Z3RO precoder.

    `selection` is one of "first", "strongest", "weakest" or "explicit"
    (with `indices` given). Ties are broken by lowest antenna index.
    """
    m = len(gains)
    ms = int(num_saturated)
    if ms != num_saturated or not 0 < ms <= m // 2:
        raise ValueError(
            f"num_saturated must satisfy 0 < M_s <= floor(M/2), got M_s={num_saturated}, M={m}"
        )
    if 2 * ms == m:
        warnings.warn(
            f"M_s = M/2 ({ms} of {m}) yields a degenerate (zero) array gain",
            stacklevel=2,
        )
    if indices is not None or selection == "explicit":
        if indices is None:
            raise ValueError("selection='explicit' requires indices")
        idx = np.asarray(indices, dtype=int)
        if idx.size != ms or len(set(idx.tolist())) != ms:
            raise ValueError("explicit indices must be duplicate-free and match num_saturated")
        if np.any(idx < 0) or np.any(idx >= m):
            raise ValueError("explicit indices out of range")
        return np.sort(idx)
    if selection == "first":
        return np.arange(ms)
    if selection in ("strongest", "weakest"):
        mags = np.abs(np.asarray(gains))
        key = -mags if selection == "strongest" else mags
        order = np.argsort(key, kind="stable")  # ties resolve to lowest index
        return np.sort(order[:ms])
    raise ValueError(f"unknown selection {selection!r}")


def mrt_weights(h) -> PrecoderWeights:
    """MRT precoder w_m = alpha * conj(h_m) with
    alpha = sqrt(M / sum|h|^2)."""
    gains = _as_gains(h)
    total = float(np.sum(np.abs(gains) ** 2))
    if total == 0.0:
        raise ValueError("MRT is undefined for an all-zero channel")
    alpha = np.sqrt(gains.size / total)
    return PrecoderWeights(alpha * np.conj(gains))


def z3ro_los_weights(
    geometry: ArrayGeometry,
    user_angle: float,
    path_loss: float = 1.0,
    num_saturated: int = 1,
    selection: str = "first",
    indices=None,
) -> PrecoderWeights:
    """Z3RO precoder for a pure LOS ULA channel.

    The `num_saturated` selected antennas carry
    ``-alpha * ((M - M_s)/M_s)^(1/3) * exp(j*phi_m)`` and the rest
    ``alpha * exp(j*phi_m)``, with
    ``alpha = sqrt(M) / sqrt(M - M_s + M_s^(1/3) (M - M_s)^(2/3))``.
    """
    m = geometry.num_antennas
    if not 0.0 < user_angle < np.pi:
        raise ValueError(f"user_angle must lie in (0, pi), got {user_angle}")
    if not path_loss > 0:
        raise ValueError("path_loss must be > 0")
    phi = geometry.phase_profile(user_angle)
    sat = saturated_indices(np.full(m, np.sqrt(path_loss)), num_saturated, selection, indices)
    ms = sat.size
    alpha = np.sqrt(m) / np.sqrt((m - ms) + ms ** (1.0 / 3.0) * (m - ms) ** (2.0 / 3.0))
    gamma = ((m - ms) / ms) ** (1.0 / 3.0)
    levels = np.full(m, alpha)
    levels[sat] = -alpha * gamma
    w = levels * np.exp(1j * phi)
    # float residue in sum|w|^2 stays well under the 1e-9 budget
    return PrecoderWeights(w)


def z3ro_weights(
    h,
    num_saturated: int = 1,
    selection: str = "first",
    indices=None,
) -> PrecoderWeights:
    """Z3RO precoder for a general channel.

    Saturated antennas carry ``-gamma * alpha * conj(h_m)`` where
    ``gamma = (sum_unsat |h|^4 / sum_sat |h|^4)^(1/3)``; the others carry
    ``alpha * conj(h_m)``. Reduces to the LOS construction when all |h_m|
    are equal.
    """
    gains = _as_gains(h)
    m = gains.size
    sat = saturated_indices(gains, num_saturated, selection, indices)
    mask = np.zeros(m, dtype=bool)
    mask[sat] = True
    h2 = np.abs(gains) ** 2
    h4 = h2**2
    sat_h4 = float(np.sum(h4[mask]))
    if sat_h4 == 0.0:
        raise ValueError("degenerate selection: saturated antennas have all-zero gains")
    gamma = (float(np.sum(h4[~mask])) / sat_h4) ** (1.0 / 3.0)
    denom = float(np.sum(h2[~mask])) + gamma**2 * float(np.sum(h2[mask]))
    alpha = np.sqrt(m / denom)
    scale = np.where(mask, -gamma * alpha, alpha)
    return PrecoderWeights(scale * np.conj(gains))


def zero_distortion_residual(h, w) -> complex:
    """The third-order distortion sum ``sum_m h_m w_m |w_m|^2`` (zero for any
    Z3RO precoder, M*sqrt(beta)*... for MRT on LOS)."""
    gains = _as_gains(h)
    weights = w.weights if isinstance(w, PrecoderWeights) else np.asarray(w, dtype=complex)
    if gains.size != weights.size:
        raise ValueError(f"dimension mismatch: M={gains.size} channel vs {weights.size} weights")
    return complex(np.sum(gains * weights * np.abs(weights) ** 2))


def snr_mrt(h, budget: LinkBudget) -> float:
    """Closed-form MRT SNR, p*M*sum|h|^2 / sigma_v^2 (linear scale)."""
    gains = _as_gains(h)
    return (
        budget.symbol_power
        * gains.size
        * float(np.sum(np.abs(gains) ** 2))
        / budget.noise_power
    )


def z3ro_snr(num_antennas: int, num_saturated: int, budget: LinkBudget) -> float:
    """Closed-form Z3RO SNR for a LOS channel (linear scale):

    (beta*p/sigma_v^2) * M * ((M-M_s)^(2/3) - M_s^(2/3))^2
                           / ((M-M_s)^(1/3) + M_s^(1/3))
    """
    m, ms = int(num_antennas), int(num_saturated)
    if not 0 < ms <= m // 2:
        raise ValueError(f"invalid M_s={num_saturated} for M={num_antennas}")
    a = float(m - ms)
    factor = m * (a ** (2.0 / 3.0) - ms ** (2.0 / 3.0)) ** 2 / (a ** (1.0 / 3.0) + ms ** (1.0 / 3.0))
    return budget.path_loss * budget.symbol_power / budget.noise_power * factor


@dataclass(frozen=True)
class ReceivedSample:
    """One received sample r = linear + distortion + noise (exactly)."""

    value: complex
    linear: complex
    distortion: complex
    noise: complex


def received_signal(h, w: PrecoderWeights, s: complex, pa: PaModel, noise: complex = 0.0):
    """Assemble r = sum_m h_m * pa(w_m * s) + noise.

    For ideal and third-order PAs the linear/distortion components are exact;
    for other models the linear part is the small-signal reference
    ``s * sum h_m w_m`` and the distortion is the remainder.
    """
    gains = _as_gains(h)
    weights = w.weights if isinstance(w, PrecoderWeights) else np.asarray(w, dtype=complex)
    if gains.size != weights.size:
        raise ValueError(f"dimension mismatch: M={gains.size} channel vs {weights.size} weights")
    x = weights * s
    if isinstance(pa, (IdealPa, ThirdOrderPa)):
        lin, dist = third_order_split(pa, x)
        linear = complex(np.sum(gains * lin))
        distortion = complex(np.sum(gains * dist))
    else:
        y = pa.amplify(x)
        linear = complex(np.sum(gains * x))
        distortion = complex(np.sum(gains * y)) - linear
    value = linear + distortion + noise
    return ReceivedSample(value=value, linear=linear, distortion=distortion, noise=complex(noise))


class _BasePrecoder(TransformerMixin, BaseEstimator):
    """Common fit/transform surface for precoder estimators.

    fit(X) takes a length-M complex gain vector (or ChannelRealization) and
    synthesizes ``weights_``; transform(s) maps n symbols to the (n, M)
    per-antenna PA-input matrix.
    """

    def fit(self, X, y=None):
        gains = _as_gains(X)
        self.weights_ = self._synthesize(gains)
        self.n_antennas_ = gains.size
        return self

    def transform(self, X):
        if not hasattr(self, "weights_"):
            raise AttributeError("precoder is not fitted; call fit(channel) first")
        s = np.asarray(X, dtype=complex).reshape(-1)
        return np.outer(s, self.weights_.weights)

    def _synthesize(self, gains) -> PrecoderWeights:
        raise NotImplementedError


class MrtPrecoder(_BasePrecoder):
    """Maximum ratio transmission, w_m = alpha * conj(h_m)."""

    def _synthesize(self, gains):
        return mrt_weights(gains)


class Z3roPrecoder(_BasePrecoder):
    """Zero third-order distortion precoder.

    Parameters
    ----------
    num_saturated : int
        Number of saturated antennas M_s, with 0 < M_s <= floor(M/2).
    selection : {"first", "strongest", "weakest", "explicit"}
        How the saturated subset is chosen. "strongest" avoids the
        pathological case of saturating a deeply faded antenna.
    indices : sequence of int, optional
        Saturated antenna indices when selection="explicit".
    """

    def __init__(self, num_saturated=1, selection="first", indices=None):
        self.num_saturated = num_saturated
        self.selection = selection
        self.indices = indices

    def _synthesize(self, gains):
        return z3ro_weights(gains, self.num_saturated, self.selection, self.indices)
