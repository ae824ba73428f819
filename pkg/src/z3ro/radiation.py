"""Radiation patterns, total radiated power and directivity.

For an ideal or third-order PA driven by circularly symmetric Gaussian
symbols the per-direction radiated power has the exact closed form

    P(t) = p*|A(t)|^2 + 4*p^2*Re(A(t)*conj(B(t))) + 6*p^3*|B(t)|^2

with A(t) = sum_m w_m exp(-j*phi_m(t)) the linear field sum and
B(t) = a3 * sum_m w_m |w_m|^2 exp(-j*phi_m(t)) the third-order field sum
(Gaussian moments E|s|^4 = 2p^2, E|s|^6 = 6p^3).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import ArrayGeometry, PrecoderWeights
from .pa import IdealPa, PaModel, ThirdOrderPa

__all__ = [
    "AngularGrid",
    "PatternResult",
    "radiation_pattern",
    "directivity",
    "total_distortion_power",
]

# Field sums whose magnitude falls below this fraction of their term-wise
# magnitude budget are pure cancellation residue and snap to an exact 0,
# so designed nulls serialize as -inf dB rather than float noise.
_NULL_CLAMP_REL = 1e-12

_MIN_DIRECTIVITY_GRID = 1024


@dataclass(frozen=True)
class AngularGrid:
    """Strictly increasing observation angles in (-pi, pi] (radians)."""

    angles: np.ndarray

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float)
        if angles.ndim != 1 or angles.size == 0:
            raise ValueError("angles must be a nonempty 1-D vector")
        if np.any(np.diff(angles) <= 0):
            raise ValueError("angles must be strictly increasing")
        if angles[0] <= -np.pi or angles[-1] > np.pi:
            raise ValueError("angles must lie in (-pi, pi]")
        angles.setflags(write=False)
        object.__setattr__(self, "angles", angles)

    @classmethod
    def uniform(cls, n: int = 4096):
        """Uniform grid of n angles covering the full circle (-pi, pi]."""
        step = 2.0 * np.pi / n
        return cls(-np.pi + step * np.arange(1, n + 1))

    @property
    def num_angles(self):
        return self.angles.size

    @property
    def is_uniform(self):
        if self.angles.size < 2:
            return False
        steps = np.diff(self.angles)
        return bool(np.allclose(steps, steps[0], rtol=1e-9, atol=0.0))

    @property
    def spans_circle(self):
        step = 2.0 * np.pi / self.angles.size
        return self.is_uniform and np.isclose(self.angles[-1] - self.angles[0], 2 * np.pi - step)


@dataclass
class PatternResult:
    """Per-angle radiated powers and (optionally) directivities."""

    angles: np.ndarray
    p_total: np.ndarray
    p_linear: np.ndarray
    p_dist3: np.ndarray
    total_power: Optional[float] = None
    total_linear: Optional[float] = None
    total_dist3: Optional[float] = None
    d_total: Optional[np.ndarray] = field(default=None, repr=False)
    d_linear: Optional[np.ndarray] = field(default=None, repr=False)
    d_dist3: Optional[np.ndarray] = field(default=None, repr=False)


def _clamped_field_sum(coeffs, phases):
    """sum_m coeffs[m] * exp(-j*phases[..., m]) with designed-null snapping."""
    total = np.exp(-1j * phases) @ coeffs
    budget = float(np.sum(np.abs(coeffs)))
    if budget > 0.0:
        total = np.where(np.abs(total) <= _NULL_CLAMP_REL * budget, 0.0, total)
    return total


def radiation_pattern(
    geometry: ArrayGeometry,
    w: PrecoderWeights,
    pa: PaModel,
    symbol_power: float,
    grid: AngularGrid,
    split: str = "raw",
) -> PatternResult:
    """Evaluate P(t) on `grid` for an ideal or third-order PA.

    `split` selects the decomposition plotted as the linear/distortion
    curves: "raw" uses p|A|^2 and 6p^3|B|^2 directly, "bussgang" replaces
    the linear field by its Bussgang-scaled version A + 2pB and keeps the
    uncorrelated residue 2p^3|B|^2 as distortion. The total P(t) is the same
    either way.
    """
    if isinstance(pa, IdealPa):
        a3 = 0.0 + 0.0j
    elif isinstance(pa, ThirdOrderPa):
        a3 = complex(pa.a3)
    else:
        raise TypeError(
            "radiation_pattern needs an ideal or third-order PA; use the Monte Carlo "
            "link metrics for other models"
        )
    if not symbol_power > 0:
        raise ValueError("symbol_power must be > 0")
    if split not in ("raw", "bussgang"):
        raise ValueError(f"unknown split {split!r}")
    weights = w.weights
    if weights.size != geometry.num_antennas:
        raise ValueError("weights length does not match the array geometry")
    p = float(symbol_power)
    phases = geometry.phase_profile(grid.angles)
    a_sum = _clamped_field_sum(weights, phases)
    b_sum = a3 * _clamped_field_sum(weights * np.abs(weights) ** 2, phases)
    p_total = (
        p * np.abs(a_sum) ** 2
        + 4.0 * p**2 * np.real(a_sum * np.conj(b_sum))
        + 6.0 * p**3 * np.abs(b_sum) ** 2
    )
    np.maximum(p_total, 0.0, out=p_total)
    if split == "raw":
        p_linear = p * np.abs(a_sum) ** 2
        p_dist3 = 6.0 * p**3 * np.abs(b_sum) ** 2
    else:
        p_linear = p * np.abs(a_sum + 2.0 * p * b_sum) ** 2
        p_dist3 = 2.0 * p**3 * np.abs(b_sum) ** 2
    return PatternResult(angles=grid.angles, p_total=p_total, p_linear=p_linear, p_dist3=p_dist3)


def _require_integrable(grid: AngularGrid):
    if not grid.is_uniform or not grid.spans_circle:
        raise ValueError("integration requires a uniform grid covering (-pi, pi]")
    if grid.num_angles < _MIN_DIRECTIVITY_GRID:
        raise ValueError(f"grid too coarse: need >= {_MIN_DIRECTIVITY_GRID} angles")


def _integrate(values, grid: AngularGrid):
    # composite trapezoid == rectangle rule for a periodic integrand on a
    # uniform grid over the full circle
    step = 2.0 * np.pi / grid.num_angles
    return float(np.sum(values) * step)


def directivity(pattern: PatternResult, grid: AngularGrid) -> PatternResult:
    """Populate the directivity fields D(t) = P(t) / (P_T / 2pi).

    Each component curve is normalized by its own total radiated power, so an
    isotropic component has directivity 1 everywhere.
    """
    _require_integrable(grid)

    def _normalize(values):
        total = _integrate(values, grid)
        if total == 0.0:
            return np.zeros_like(values), 0.0
        return values / (total / (2.0 * np.pi)), total

    pattern.d_total, pattern.total_power = _normalize(pattern.p_total)
    pattern.d_linear, pattern.total_linear = _normalize(pattern.p_linear)
    pattern.d_dist3, pattern.total_dist3 = _normalize(pattern.p_dist3)
    return pattern


def total_distortion_power(pattern: PatternResult, grid: AngularGrid) -> float:
    """Integrated third-order radiated power over the full circle."""
    _require_integrable(grid)
    return _integrate(pattern.p_dist3, grid)
