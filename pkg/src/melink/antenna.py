"""ME laminate resonance and a lumped resonator model for single antennas and arrays.

The electrical model is the usual piezo equivalent: a static capacitance in
parallel with one motional series R-L-C branch. It only describes the
fundamental mode (roughly 31-41 kHz for the reference laminate); higher modes
are not represented.

Large drive lowers the effective stiffness. That is modelled as a quadratic
shift of the motional resonance, ``f0 + softening_coeff * drive**2``, with Q
held fixed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError

VALID_BAND = (31e3, 41e3)  # Hz


@dataclass(frozen=True)
class LaminateSpec:
    length_L: float  # m
    young_pzt: float  # Pa
    young_metglas: float  # Pa
    vol_frac_pzt: float
    vol_frac_metglas: float
    density_pzt: float  # kg/m^3
    density_metglas: float  # kg/m^3
    piezo_thickness_t: float = 150e-6  # m

    def __post_init__(self):
        if abs(self.vol_frac_pzt + self.vol_frac_metglas - 1.0) > 1e-9:
            raise DomainError(
                f"volume fractions must sum to 1, got {self.vol_frac_pzt} + {self.vol_frac_metglas}"
            )
        if self.vol_frac_pzt < 0 or self.vol_frac_metglas < 0:
            raise DomainError("volume fractions must be non-negative")
        for name in ("length_L", "young_pzt", "young_metglas", "density_pzt",
                     "density_metglas", "piezo_thickness_t"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0, got {getattr(self, name)}")


# PZT-5J / Metglas 2605SA1 bar, 45.7 mm long, 25-150-25 um stack.
REFERENCE_LAMINATE = LaminateSpec(
    length_L=45.7e-3,
    young_pzt=51e9,
    young_metglas=110e9,
    vol_frac_pzt=0.6,
    vol_frac_metglas=0.4,
    density_pzt=7800.0,
    density_metglas=7180.0,
    piezo_thickness_t=150e-6,
)


def resonance_frequency(spec: LaminateSpec) -> float:
    """Longitudinal half-wave resonance of a two-phase laminate bar, in Hz.

    Uses volume-averaged stiffness and density:
    f_r = 1/(2L) * sqrt((vP*YP + vM*YM) / (vP*rhoP + vM*rhoM)).
    """
    stiffness = spec.vol_frac_pzt * spec.young_pzt + spec.vol_frac_metglas * spec.young_metglas
    density = spec.vol_frac_pzt * spec.density_pzt + spec.vol_frac_metglas * spec.density_metglas
    return math.sqrt(stiffness / density) / (2.0 * spec.length_L)


def me_coefficient(delta_voltage: float, delta_field: float, piezo_thickness_t: float) -> float:
    """Magnetoelectric coupling (dV/dH)/t from a finite difference, in (V/m)/(A/m)."""
    if delta_field == 0:
        raise DomainError("field increment must be non-zero")
    if not piezo_thickness_t > 0:
        raise DomainError(f"piezo thickness must be > 0, got {piezo_thickness_t}")
    return delta_voltage / delta_field / piezo_thickness_t


@dataclass(frozen=True)
class Resonator:
    """Static capacitance || series R-L-C.

    ``r_resonance`` is the motional resistance, which is the impedance of the
    motional branch at resonance. ``softening_coeff`` is in Hz/V^2; negative
    values pull the resonance down with drive.
    """

    f0: float = 35.5e3
    quality_Q: float = 200.0
    r_resonance: float = 50.0
    c_static: float = 2e-9
    softening_coeff: float = 0.0

    def __post_init__(self):
        for name in ("f0", "quality_Q", "r_resonance", "c_static"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0, got {getattr(self, name)}")

    @property
    def bandwidth(self) -> float:
        return self.f0 / self.quality_Q

    def effective_f0(self, drive_amplitude: float = 0.0) -> float:
        if drive_amplitude < 0:
            raise DomainError(f"drive amplitude must be >= 0, got {drive_amplitude}")
        f = self.f0 + self.softening_coeff * drive_amplitude**2
        if f <= 0:
            raise DomainError(f"drive {drive_amplitude} V softens the resonance below 0 Hz")
        return f


def _omega(frequency):
    f = np.asarray(frequency, dtype=float)
    if np.any(f <= 0):
        raise DomainError("frequency must be > 0 Hz")
    return 2 * np.pi * f


def motional_impedance(resonator: Resonator, frequency, drive_amplitude: float = 0.0):
    w0 = 2 * np.pi * resonator.effective_f0(drive_amplitude)
    w = _omega(frequency)
    r = resonator.r_resonance
    inductance = resonator.quality_Q * r / w0
    capacitance = 1.0 / (w0**2 * inductance)
    return r + 1j * w * inductance + 1.0 / (1j * w * capacitance)


def impedance(resonator: Resonator, frequency, drive_amplitude: float = 0.0):
    """Complex terminal impedance in ohms (scalar or array over frequency)."""
    zm = motional_impedance(resonator, frequency, drive_amplitude)
    zc = 1.0 / (1j * _omega(frequency) * resonator.c_static)
    return zm * zc / (zm + zc)


class Wiring(enum.Enum):
    SERIES = "series"
    PARALLEL = "parallel"


@dataclass(frozen=True)
class ArraySpec:
    elements: tuple[Resonator, ...]
    wiring: Wiring = Wiring.PARALLEL

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "wiring", Wiring(self.wiring))
        if not self.elements:
            raise DomainError("array needs at least one element")

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @classmethod
    def uniform(cls, resonator: Resonator, n: int, wiring=Wiring.PARALLEL) -> "ArraySpec":
        if n < 1:
            raise DomainError(f"array needs at least one element, got {n}")
        return cls((resonator,) * n, wiring)

    @classmethod
    def jittered(cls, resonator: Resonator, n: int, wiring=Wiring.PARALLEL, *,
                 f0_jitter: float = 0.01, r_jitter: float = 0.0, seed=None) -> "ArraySpec":
        """Elements with f0 and r_resonance drawn uniformly within +-jitter (fractional)."""
        if n < 1:
            raise DomainError(f"array needs at least one element, got {n}")
        rng = np.random.default_rng(seed)
        df = rng.uniform(-f0_jitter, f0_jitter, n)
        dr = rng.uniform(-r_jitter, r_jitter, n)
        elements = [
            replace(resonator, f0=resonator.f0 * (1 + a), r_resonance=resonator.r_resonance * (1 + b))
            for a, b in zip(df, dr)
        ]
        return cls(tuple(elements), wiring)


def array_impedance(array: ArraySpec, frequency, drive_amplitude: float = 0.0):
    zs = [impedance(el, frequency, drive_amplitude) for el in array.elements]
    if array.wiring is Wiring.SERIES:
        return sum(zs)
    return 1.0 / sum(1.0 / z for z in zs)


def transfer(array: ArraySpec, frequency, drive_amplitude: float = 0.0):
    """Normalized complex response of the radiating (motional) branches.

    Each element contributes R/Z_motional, a second-order band-pass with unit
    peak at its resonance; the array response is their mean.
    """
    hs = [el.r_resonance / motional_impedance(el, frequency, drive_amplitude) for el in array.elements]
    return sum(hs) / len(hs)


class FrequencyResponse(NamedTuple):
    gain: float
    phase: float  # rad
    group_delay: float  # s


def frequency_response(array: ArraySpec, frequency, drive_amplitude: float = 0.0,
                       step_hz: float = 1.0) -> FrequencyResponse:
    """Gain, phase and group delay of :func:`transfer`.

    Group delay is -dphi/domega by central difference over +-``step_hz``.
    """
    f = np.asarray(frequency, dtype=float)
    h = transfer(array, f, drive_amplitude)
    lo = transfer(array, f - step_hz, drive_amplitude)
    hi = transfer(array, f + step_hz, drive_amplitude)
    dphi = np.angle(hi * np.conj(lo))
    tau = -dphi / (2 * np.pi * 2 * step_hz)
    return FrequencyResponse(np.abs(h), np.angle(h), tau)


def extremal_impedance_frequency(array: ArraySpec, f_lo: float = VALID_BAND[0],
                                 f_hi: float = VALID_BAND[1], drive_amplitude: float = 0.0,
                                 points: int = 4001) -> float:
    """Frequency of minimum |Z| in [f_lo, f_hi], grid search then bounded refinement."""
    f = np.linspace(f_lo, f_hi, points)
    mag = np.abs(array_impedance(array, f, drive_amplitude))
    i = int(np.argmin(mag))
    a, b = f[max(i - 1, 0)], f[min(i + 1, points - 1)]
    res = minimize_scalar(
        lambda x: float(np.abs(array_impedance(array, x, drive_amplitude))),
        bounds=(a, b), method="bounded", options={"xatol": 1e-6},
    )
    return float(res.x)


def bandwidth_3db(frequency, gain) -> float:
    """Span between the outermost points where gain >= peak/sqrt(2)."""
    f = np.asarray(frequency, dtype=float)
    g = np.asarray(gain, dtype=float)
    above = np.flatnonzero(g >= g.max() / math.sqrt(2))
    return float(f[above[-1]] - f[above[0]])
