"""Link-budget scaling laws and a piecewise log-distance path-loss fit.

Radiation resistance of an electrically small antenna goes as
1/(lambda^2 sqrt(eps_r)), so moving the same antenna between media changes it
by (lambda_a/lambda_b)^2 sqrt(eps_a/eps_b). A transmit array of N_t elements
radiates N_t^2 times the power of one element (dipole moment adds linearly)
and a receive array of N_r elements gains N_r in sensitivity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError
from .medium import ConductiveMedium, free_space_wavelength, wavelength


def radiation_resistance_ratio_media(lambda_a: float, lambda_b: float,
                                     eps_r_a: float = 1.0, eps_r_b: float = 1.0) -> float:
    """R_rad(b) / R_rad(a) for the same antenna in two media."""
    for name, v in (("lambda_a", lambda_a), ("lambda_b", lambda_b),
                    ("eps_r_a", eps_r_a), ("eps_r_b", eps_r_b)):
        if not v > 0:
            raise DomainError(f"{name} must be > 0, got {v}")
    return (lambda_a / lambda_b) ** 2 * math.sqrt(eps_r_a / eps_r_b)


def radiation_resistance_ratio_air_to(medium: ConductiveMedium, frequency: float) -> float:
    """Gain in R_rad from moving an antenna out of air (eps_r = 1) into ``medium``."""
    return radiation_resistance_ratio_media(
        float(free_space_wavelength(frequency)), float(wavelength(medium, frequency)),
        1.0, medium.relative_permittivity,
    )


def radiation_resistance_ratio_between(a: ConductiveMedium, b: ConductiveMedium,
                                       frequency: float) -> float:
    """R_rad(b) / R_rad(a) at one frequency; reduces to sigma_b/sigma_a when mu and eps_r match."""
    return radiation_resistance_ratio_media(
        float(wavelength(a, frequency)), float(wavelength(b, frequency)),
        a.relative_permittivity, b.relative_permittivity,
    )


class ArrayGains(NamedTuple):
    tx_power_gain: float
    rx_gain: float
    combined: float


def _check_count(name, n):
    if int(n) != n or n < 1:
        raise DomainError(f"{name} must be an integer >= 1, got {n}")
    return int(n)


def array_gains(n_tx: int, n_rx: int, efficiency: float = 1.0) -> ArrayGains:
    """(n_tx^2, n_rx, n_tx^2 * n_rx * efficiency).

    ``efficiency`` in [0, 1] is a user-supplied derating for mutual coupling
    and element mismatch; 1 is the ideal coherent array.
    """
    n_tx = _check_count("n_tx", n_tx)
    n_rx = _check_count("n_rx", n_rx)
    if not 0.0 <= efficiency <= 1.0:
        raise DomainError(f"efficiency must lie in [0, 1], got {efficiency}")
    tx = n_tx * n_tx
    combined = tx * n_rx
    if efficiency != 1.0:
        combined = combined * efficiency
    return ArrayGains(tx, n_rx, combined)


@dataclass(frozen=True)
class LinkScaling:
    rad_resistance_ratio: float
    tx_array_power_gain: float
    rx_array_gain: float
    total_link_factor: float
    total_link_db: float  # 20*log10(factor)
    total_link_db_power: float  # 10*log10(factor)


def total_link_budget(medium_ratio: float, n_tx: int, n_rx: int,
                      efficiency: float = 1.0) -> LinkScaling:
    if not medium_ratio > 0:
        raise DomainError(f"medium ratio must be > 0, got {medium_ratio}")
    gains = array_gains(n_tx, n_rx, efficiency)
    factor = medium_ratio * gains.combined
    if factor <= 0:
        raise DomainError("link factor is zero; efficiency must be > 0 to express it in dB")
    return LinkScaling(
        rad_resistance_ratio=medium_ratio,
        tx_array_power_gain=gains.tx_power_gain,
        rx_array_gain=gains.rx_gain,
        total_link_factor=factor,
        total_link_db=20 * math.log10(factor),
        total_link_db_power=10 * math.log10(factor),
    )


# -- empirical path loss ------------------------------------------------------

FLAGS = ("ok", "anomaly", "noisefloor_shift")


@dataclass(frozen=True)
class RangeSample:
    distance: float  # m
    peak_snr: float  # dB
    frequency_at_peak: float = float("nan")  # Hz
    flag: str = "ok"
    label: str = ""

    def __post_init__(self):
        if not self.distance > 0:
            raise DomainError(f"distance must be > 0 m, got {self.distance}")
        if self.flag not in FLAGS:
            raise DomainError(f"flag must be one of {FLAGS}, got {self.flag!r}")


class Segment(NamedTuple):
    r_min: float
    r_max: float
    exponent: float
    level_at_rmin: float  # dB


@dataclass(frozen=True)
class PathLossModel:
    """Piecewise log-distance model, SNR(r) = level_at_rmin - 10 n log10(r / r_min) per segment."""

    segments: tuple[Segment, ...]
    noise_floor: float = 0.0  # dB, reference the SNR levels are quoted against
    rms_residual: float = 0.0  # dB, from the fit that produced the model
    excluded: tuple[int, ...] = field(default=())  # sample indices left out of the fit

    def __post_init__(self):
        segs = tuple(Segment(*s) for s in self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise DomainError("path-loss model needs at least one segment")
        for i, s in enumerate(segs):
            if not 0 < s.r_min < s.r_max:
                raise DomainError(f"segment {i}: need 0 < r_min < r_max, got {s.r_min}, {s.r_max}")
            if not math.isfinite(s.exponent):
                raise DomainError(f"segment {i}: exponent is not finite")
        for i, (a, b) in enumerate(zip(segs, segs[1:])):
            if not math.isclose(a.r_max, b.r_min, rel_tol=1e-12):
                raise DomainError(f"segments {i} and {i + 1} are not contiguous")

    @property
    def breakpoints(self) -> list[float]:
        return [s.r_min for s in self.segments[1:]]

    @property
    def span(self) -> tuple[float, float]:
        return self.segments[0].r_min, self.segments[-1].r_max

    @classmethod
    def from_exponents(cls, r_min: float, r_max: float, breakpoints: Sequence[float],
                       exponents: Sequence[float], level_at_rmin: float,
                       noise_floor: float = 0.0) -> "PathLossModel":
        """Continuous model from exponents and the starting level; levels chain across breakpoints."""
        edges = [r_min, *breakpoints, r_max]
        if len(exponents) != len(edges) - 1:
            raise DomainError(f"need {len(edges) - 1} exponents, got {len(exponents)}")
        segs = []
        level = level_at_rmin
        for lo, hi, n in zip(edges, edges[1:], exponents):
            segs.append(Segment(lo, hi, n, level))
            level = level - 10 * n * math.log10(hi / lo)
        return cls(tuple(segs), noise_floor)


def predict_snr(model: PathLossModel, distance, extrapolate: bool = False):
    """Evaluate the piecewise model. Scalar in, float out; array in, array out.

    Distances outside the model span raise unless ``extrapolate`` is set, in
    which case the first/last segment is extended.
    """
    r = np.asarray(distance, dtype=float)
    if np.any(~(r > 0)):
        raise DomainError(f"distance must be > 0 m, got {distance}")
    lo, hi = model.span
    if not extrapolate and (np.any(r < lo * (1 - 1e-12)) or np.any(r > hi * (1 + 1e-12))):
        raise DomainError(f"distance outside model span [{lo}, {hi}] m; pass extrapolate=True")
    starts = np.array([s.r_min for s in model.segments])
    idx = np.clip(np.searchsorted(starts, r, side="right") - 1, 0, len(starts) - 1)
    r0 = starts[idx]
    n = np.array([s.exponent for s in model.segments])[idx]
    level = np.array([s.level_at_rmin for s in model.segments])[idx]
    out = level - 10 * n * np.log10(r / r0)
    return float(out) if out.ndim == 0 else out


def fit_path_loss(samples: Sequence[RangeSample], breakpoints: Sequence[float] = (),
                  exclude: Sequence[bool] | None = None, noise_floor: float = 0.0) -> PathLossModel:
    """Least-squares continuous piecewise-linear fit of SNR(dB) against log10(r).

    Continuity at the breakpoints is built into the basis (a hinge term per
    breakpoint), so all segments are solved jointly. Each segment must hold at
    least two included samples. Samples on a breakpoint belong to the segment
    to its right.

    ``exclude`` is a boolean mask over ``samples``; masked samples are left out
    of the fit and recorded in ``PathLossModel.excluded``.
    """
    if exclude is None:
        exclude = [False] * len(samples)
    if len(exclude) != len(samples):
        raise DomainError("exclusion mask length differs from sample count")
    used = [s for s, x in zip(samples, exclude) if not x]
    excluded = tuple(i for i, x in enumerate(exclude) if x)
    if len(used) < 2:
        raise DomainError("need at least two samples to fit")
    r = np.array([s.distance for s in used])
    y = np.array([s.peak_snr for s in used])
    if not np.all(np.isfinite(y)):
        raise DomainError("peak SNR values must be finite")
    r_min, r_max = float(r.min()), float(r.max())
    bps = sorted(float(b) for b in breakpoints)
    for b in bps:
        if not r_min < b < r_max:
            raise DomainError(f"breakpoint {b} m lies outside the sample span ({r_min}, {r_max}) m")
    edges = [r_min, *bps, r_max]
    seg_idx = np.clip(np.searchsorted(bps, r, side="right"), 0, len(bps))
    for i, (lo, hi) in enumerate(zip(edges, edges[1:])):
        count = int(np.sum(seg_idx == i))
        if count < 2:
            raise DomainError(
                f"segment {i} [{lo:g}, {hi:g}] m has {count} sample(s); at least 2 are needed"
            )

    x = np.log10(r)
    x0 = math.log10(r_min)
    cols = [np.ones_like(x), x - x0]
    cols += [np.maximum(0.0, x - math.log10(b)) for b in bps]
    design = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef

    slopes = np.cumsum(coef[1:])  # dB per decade, one per segment
    segs = []
    level = float(coef[0])
    for lo, hi, slope in zip(edges, edges[1:], slopes):
        segs.append(Segment(lo, hi, float(-slope / 10.0), level))
        level = level + slope * math.log10(hi / lo)
    return PathLossModel(tuple(segs), noise_floor, float(np.sqrt(np.mean(resid**2))), excluded)


def flagged_mask(samples: Sequence[RangeSample]) -> list[bool]:
    """True for every sample whose flag is not ``ok``; feed to ``fit_path_loss(exclude=...)``."""
    return [s.flag != "ok" for s in samples]
