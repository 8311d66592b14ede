"""Shannon-Hartley capacity of a frequency-selective channel from a binned SNR spectrum.

C = sum_n log2(1 + S_n / N_n) * df over uniform bins. Bin ``n`` covers
[start + n df, start + (n+1) df); the cumulative curve is reported at the
upper edge of each bin so that band capacity is a difference of two curve
values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

DEFAULT_NOISE_FLOOR_DBV = -91.0


@dataclass(frozen=True)
class SnrSpectrum:
    start_frequency: float  # Hz
    delta_f: float  # Hz
    signal_power: np.ndarray  # linear, per bin
    noise_power: np.ndarray  # linear, per bin (scalars are broadcast)

    def __post_init__(self):
        s = np.atleast_1d(np.asarray(self.signal_power, dtype=float))
        n = np.broadcast_to(np.asarray(self.noise_power, dtype=float), s.shape).copy()
        object.__setattr__(self, "signal_power", s)
        object.__setattr__(self, "noise_power", n)
        if not self.delta_f > 0:
            raise DomainError(f"bin width must be > 0 Hz, got {self.delta_f}")
        if s.ndim != 1 or s.size == 0:
            raise DomainError("spectrum needs a non-empty 1-D signal array")
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(n))):
            raise DomainError("powers must be finite")
        if np.any(s < 0):
            raise DomainError("signal power must be >= 0")
        bad = np.flatnonzero(n <= 0)
        if bad.size:
            raise DomainError(f"noise power must be > 0; bin {bad[0]} is {n[bad[0]]}")

    @property
    def n_bins(self) -> int:
        return self.signal_power.size

    @property
    def bandwidth(self) -> float:
        return self.n_bins * self.delta_f

    @property
    def frequencies(self) -> np.ndarray:
        """Lower edge (nominal frequency) of every bin."""
        return self.start_frequency + self.delta_f * np.arange(self.n_bins)

    @property
    def stop_frequency(self) -> float:
        return self.start_frequency + self.bandwidth

    @property
    def snr(self) -> np.ndarray:
        return self.signal_power / self.noise_power

    @classmethod
    def from_levels(cls, start_frequency: float, delta_f: float, level_dbv,
                    noise_floor_dbv=DEFAULT_NOISE_FLOOR_DBV) -> "SnrSpectrum":
        """Build from measured dBV levels against a noise floor.

        Bins whose level is below the floor carry zero signal power: a
        peak-hold trace cannot tell a weak signal from noise there.
        """
        level = np.asarray(level_dbv, dtype=float)
        floor = np.broadcast_to(np.asarray(noise_floor_dbv, dtype=float), level.shape)
        signal = np.where(level >= floor, 10 ** (level / 10), 0.0)
        return cls(start_frequency, delta_f, signal, 10 ** (floor / 10))

    def snr_at(self, frequency):
        """Linear SNR interpolated between bin frequencies."""
        f = np.asarray(frequency, dtype=float)
        lo, hi = self.frequencies[0], self.frequencies[-1]
        if np.any(f < lo) or np.any(f > hi):
            raise DomainError(f"frequency {frequency} Hz outside spectrum [{lo:g}, {hi:g}] Hz")
        out = np.interp(f, self.frequencies, self.snr)
        return float(out) if out.ndim == 0 else out

    def slice_bins(self, start: int, stop: int) -> "SnrSpectrum":
        return SnrSpectrum(self.start_frequency + start * self.delta_f, self.delta_f,
                           self.signal_power[start:stop], self.noise_power[start:stop])


def snr_from_levels(signal_dbv, noise_floor_dbv):
    """Power ratio from two dBV levels, 10^((s - n)/10)."""
    return 10 ** ((np.asarray(signal_dbv, dtype=float) - noise_floor_dbv) / 10)


def capacity_cumulative(spectrum: SnrSpectrum) -> tuple[np.ndarray, np.ndarray]:
    """(upper bin edges in Hz, cumulative capacity in bit/s)."""
    per_bin = np.log2(1 + spectrum.snr) * spectrum.delta_f
    edges = spectrum.start_frequency + spectrum.delta_f * np.arange(1, spectrum.n_bins + 1)
    return edges, np.cumsum(per_bin)


def total_capacity(spectrum: SnrSpectrum) -> float:
    return float(capacity_cumulative(spectrum)[1][-1])


def _edge_index(spectrum: SnrSpectrum, f: float, toward: str) -> int:
    k = (f - spectrum.start_frequency) / spectrum.delta_f
    nearest = round(k)
    if abs(k - nearest) < 1e-9 * max(1.0, abs(k)):
        return int(nearest)
    return math.ceil(k) if toward == "up" else math.floor(k)


def capacity_band(spectrum: SnrSpectrum, f_lo: float, f_hi: float) -> float:
    """Capacity of the bins lying wholly inside [f_lo, f_hi].

    Bounds are snapped to bin edges toward the interior of the band, so a
    partially covered bin at either end is dropped.
    """
    if f_lo > f_hi:
        raise DomainError(f"f_lo ({f_lo}) must not exceed f_hi ({f_hi})")
    lo_edge, hi_edge = spectrum.start_frequency, spectrum.stop_frequency
    tol = 1e-9 * spectrum.delta_f
    if f_lo < lo_edge - tol or f_hi > hi_edge + tol:
        raise DomainError(f"band [{f_lo}, {f_hi}] Hz outside spectrum [{lo_edge}, {hi_edge}] Hz")
    k_lo = _edge_index(spectrum, f_lo, "up")
    k_hi = _edge_index(spectrum, f_hi, "down")
    if k_hi <= k_lo:
        return 0.0
    cum = np.concatenate([[0.0], capacity_cumulative(spectrum)[1]])
    return float(cum[k_hi] - cum[k_lo])


def resample_uniform(frequency, level_db) -> tuple[float, float, np.ndarray]:
    """Put a non-uniform measured grid onto the coarsest uniform step it contains.

    Levels are interpolated linearly in dB. Returns (start, delta_f, levels).
    A grid that is already uniform (to 1e-9 relative) is returned unchanged.
    """
    f = np.asarray(frequency, dtype=float)
    y = np.asarray(level_db, dtype=float)
    if f.size == 1:
        raise DomainError("a single frequency point has no bin width")
    steps = np.diff(f)
    if np.any(steps <= 0):
        raise DomainError("frequencies must be strictly increasing")
    step = float(steps.max())
    if np.allclose(steps, step, rtol=1e-9, atol=0):
        return float(f[0]), float(np.mean(steps)), y
    n = int(math.floor((f[-1] - f[0]) / step + 1e-9)) + 1
    grid = f[0] + step * np.arange(n)
    return float(f[0]), step, np.interp(grid, f, y)
