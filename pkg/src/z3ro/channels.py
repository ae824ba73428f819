"""Channel construction: LOS uniform linear array and i.i.d. Rayleigh."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ArrayGeometry, SeededRng, gaussian_symbols

__all__ = ["ChannelRealization", "los_ula_channel", "iid_rayleigh_channel"]


@dataclass(frozen=True)
class ChannelRealization:
    """Complex per-antenna gains h_0..h_{M-1} plus the path loss beta."""

    gains: np.ndarray
    path_loss: float = 1.0

    def __post_init__(self):
        gains = np.asarray(self.gains, dtype=complex)
        if gains.ndim != 1 or gains.size == 0:
            raise ValueError("gains must be a nonempty 1-D complex vector")
        if not np.all(np.isfinite(gains)):
            raise ValueError("gains must be finite")
        if not self.path_loss > 0:
            raise ValueError("path_loss must be > 0")
        gains.setflags(write=False)
        object.__setattr__(self, "gains", gains)

    @property
    def num_antennas(self):
        return self.gains.size

    def __len__(self):
        return self.gains.size


def los_ula_channel(geometry: ArrayGeometry, user_angle: float, path_loss: float = 1.0):
    """Pure line-of-sight channel h_m = sqrt(beta) * exp(-j*phi_m) with
    phi_m = m*2*pi*(d/lambda)*cos(user_angle).

    `user_angle` is measured from the array axis, in radians, and must lie in
    the open interval (0, pi); callers wanting endfire pass an epsilon.
    """
    if not 0.0 < user_angle < np.pi:
        raise ValueError(f"user_angle must lie in (0, pi), got {user_angle}")
    if not path_loss > 0:
        raise ValueError("path_loss must be > 0")
    phi = geometry.phase_profile(user_angle)
    gains = np.sqrt(path_loss) * np.exp(-1j * phi)
    return ChannelRealization(gains=gains, path_loss=path_loss)


def iid_rayleigh_channel(num_antennas: int, path_loss: float, rng: SeededRng):
    """i.i.d. circularly symmetric complex Gaussian gains with
    E|h_m|^2 = path_loss (Rayleigh fading)."""
    if num_antennas < 1:
        raise ValueError("num_antennas must be >= 1")
    gains = gaussian_symbols(rng, path_loss, num_antennas)
    return ChannelRealization(gains=gains, path_loss=path_loss)
