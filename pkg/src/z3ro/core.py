"""Shared domain types, dB helpers and the seeded random source.

All powers are kept in linear units internally; dB conversions happen only
at I/O boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ArrayGeometry",
    "LinkBudget",
    "PrecoderWeights",
    "SeededRng",
    "db_from_linear",
    "linear_from_db",
    "gaussian_symbols",
]

#: A baseband complex symbol, in units of sqrt(power).
ComplexSymbol = complex

_POWER_NORM_RTOL = 1e-9


def db_from_linear(x):
    """Convert a linear power ratio to dB (10*log10).

    Accepts scalars or arrays. Nonpositive scalar input raises ValueError;
    array entries equal to 0 map to -inf (exact-null sentinel).
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        if x <= 0:
            raise ValueError(f"dB conversion requires a positive value, got {float(x)}")
        return float(10.0 * np.log10(x))
    if np.any(x < 0):
        raise ValueError("dB conversion requires nonnegative values")
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(x)


def linear_from_db(x_db):
    """Convert dB to a linear power ratio."""
    x_db = np.asarray(x_db, dtype=float)
    out = 10.0 ** (x_db / 10.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array with `num_antennas` elements spaced
    `spacing_over_wavelength` carrier wavelengths apart."""

    num_antennas: int
    spacing_over_wavelength: float = 0.5

    def __post_init__(self):
        if int(self.num_antennas) != self.num_antennas or self.num_antennas < 1:
            raise ValueError(f"num_antennas must be a positive integer, got {self.num_antennas}")
        if not self.spacing_over_wavelength > 0:
            raise ValueError("spacing_over_wavelength must be > 0")

    def phase_profile(self, angle_rad):
        """Per-antenna phase shift m*2*pi*(d/lambda)*cos(angle) as an array.

        `angle_rad` may be a scalar or an array of directions; the result has
        shape (..., num_antennas).
        """
        m = np.arange(self.num_antennas)
        cosang = np.cos(np.asarray(angle_rad, dtype=float))
        return 2.0 * np.pi * self.spacing_over_wavelength * np.multiply.outer(cosang, m)


@dataclass(frozen=True)
class LinkBudget:
    """Link-level scalars: symbol power, receiver noise power and path loss."""

    symbol_power: float
    noise_power: float
    path_loss: float = 1.0

    def __post_init__(self):
        for name in ("symbol_power", "noise_power", "path_loss"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")


class PrecoderWeights:
    """Complex antenna weights normalized so that sum(|w|^2) == num_antennas.

    The normalization mirrors the total PA-input power budget p*M: each
    synthesized precoder spends the same input power as uniform unit weights.
    """

    __slots__ = ("weights", "nominal_input_power")

    def __init__(self, weights, nominal_input_power=1.0):
        weights = np.asarray(weights, dtype=complex)
        if weights.ndim != 1 or weights.size == 0:
            raise ValueError("weights must be a nonempty 1-D complex vector")
        if not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite")
        if not nominal_input_power > 0:
            raise ValueError("nominal_input_power must be > 0")
        m = weights.size
        total = float(np.sum(np.abs(weights) ** 2))
        if abs(total - m) > _POWER_NORM_RTOL * m:
            raise ValueError(
                f"weights violate the power budget: sum|w|^2 = {total}, expected {m}"
            )
        self.weights = weights
        self.weights.setflags(write=False)
        self.nominal_input_power = float(nominal_input_power)

    @property
    def num_antennas(self):
        return self.weights.size

    def __len__(self):
        return self.weights.size

    def __repr__(self):
        return f"PrecoderWeights(M={self.num_antennas}, p={self.nominal_input_power})"


@dataclass(frozen=True)
class SeededRng:
    """Deterministic random source identified by (seed, stream_id).

    Equal (seed, stream_id) pairs produce bitwise-identical sample sequences
    on every platform. Parallel partitions must each derive their own
    sub-stream; instances are never shared between workers.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if int(v) != v or not (0 <= v < 2**64):
                raise ValueError(f"{name} must be an unsigned 64-bit integer")

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,)))

    def substream(self, index: int) -> "np.random.Generator":
        """Generator for sub-partition `index` of this stream (e.g. one Monte
        Carlo chunk). Disjoint from `generator()` and from other indices."""
        return np.random.default_rng(
            np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, int(index)))
        )


def gaussian_symbols(rng, p, n, generator=None):
    """Draw `n` i.i.d. circularly symmetric complex Gaussian symbols with
    E|s|^2 = p (models an OFDM-like waveform).

    `rng` is a SeededRng; alternatively pass a ready `generator` (used by
    chunked Monte Carlo loops to draw from a derived sub-stream).
    """
    if not p > 0:
        raise ValueError("symbol power p must be > 0")
    if n < 1:
        raise ValueError("sample count n must be >= 1")
    gen = generator if generator is not None else rng.generator()
    scale = np.sqrt(p / 2.0)
    re = gen.normal(scale=scale, size=n)
    im = gen.normal(scale=scale, size=n)
    return re + 1j * im
