"""Memoryless power amplifier models.

All PAs share one transfer function across antennas and have unit linear
gain. Each model is of the form y = x * g(|x|^2) and therefore vectorizes
element-wise over arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import db_from_linear, linear_from_db

__all__ = ["PaModel", "IdealPa", "ThirdOrderPa", "RappPa", "parse_pa", "pa_descriptor"]


class PaModel:
    """Base class for memoryless PA transfer functions."""

    def amplify(self, x):
        raise NotImplementedError


@dataclass(frozen=True)
class IdealPa(PaModel):
    """Perfectly linear amplifier, y = x."""

    def amplify(self, x):
        return np.asarray(x, dtype=complex)


@dataclass(frozen=True)
class ThirdOrderPa(PaModel):
    """Third-order polynomial PA, y = x + a3*x*|x|^2.

    `a3` is complex so that both AM/AM and AM/PM conversion are captured.
    """

    a3: complex

    def __post_init__(self):
        if not np.isfinite(self.a3):
            raise ValueError("a3 must be finite")

    def amplify(self, x):
        x = np.asarray(x, dtype=complex)
        return x + self.a3 * x * np.abs(x) ** 2

    def split(self, x):
        """Return (linear, distortion) = (x, a3*x*|x|^2); their sum equals
        amplify(x) exactly."""
        x = np.asarray(x, dtype=complex)
        return x, self.a3 * x * np.abs(x) ** 2


@dataclass(frozen=True)
class RappPa(PaModel):
    """Rapp AM/AM model, y = x / (1 + |x/sqrt(p_sat)|^(2S))^(1/(2S)).

    Phase-transparent and bounded: |y| < sqrt(saturation_power) for all
    finite inputs.
    """

    saturation_power: float
    smoothness: float = 2.0

    def __post_init__(self):
        if not self.saturation_power > 0:
            raise ValueError("saturation_power must be > 0")
        if not self.smoothness > 0:
            raise ValueError("smoothness must be > 0")

    def amplify(self, x):
        x = np.asarray(x, dtype=complex)
        u = np.abs(x) ** 2 / self.saturation_power
        s = self.smoothness
        return x * (1.0 + u**s) ** (-1.0 / (2.0 * s))


def third_order_split(model, x):
    """Linear/distortion split of a ThirdOrderPa output (variant-checked)."""
    if isinstance(model, IdealPa):
        x = np.asarray(x, dtype=complex)
        return x, np.zeros_like(x)
    if not isinstance(model, ThirdOrderPa):
        raise TypeError(f"third_order_split requires a ThirdOrderPa, got {type(model).__name__}")
    return model.split(x)


def parse_pa(descriptor: str) -> PaModel:
    """Parse a CLI PA descriptor.

    Formats: ``ideal``, ``poly3:a3_re,a3_im``, ``rapp:psat_db,S``.
    """
    descriptor = descriptor.strip()
    if descriptor == "ideal":
        return IdealPa()
    kind, _, args = descriptor.partition(":")
    try:
        if kind == "poly3":
            re, im = (float(v) for v in args.split(","))
            return ThirdOrderPa(a3=complex(re, im))
        if kind == "rapp":
            psat_db, s = (float(v) for v in args.split(","))
            return RappPa(saturation_power=linear_from_db(psat_db), smoothness=s)
    except (ValueError, TypeError) as exc:
        raise ValueError(f"malformed PA descriptor {descriptor!r}") from exc
    raise ValueError(f"unknown PA descriptor {descriptor!r}")


def pa_descriptor(model: PaModel) -> str:
    """Inverse of parse_pa for report/CSV labeling."""
    if isinstance(model, IdealPa):
        return "ideal"
    if isinstance(model, ThirdOrderPa):
        return f"poly3:{model.a3.real},{model.a3.imag}"
    if isinstance(model, RappPa):
        return f"rapp:{db_from_linear(model.saturation_power)},{model.smoothness}"
    raise TypeError(f"unknown PA model {type(model).__name__}")
