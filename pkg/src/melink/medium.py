"""Plane-wave propagation in a conductive water body.

Everything here uses the good-conductor, low-frequency form of the
propagation constant, gamma = sqrt(j*omega*mu*sigma), where displacement
current is dropped. Under that form the attenuation and phase constants are
equal, so wavelength, skin depth and field-region radii all follow from a
single number, beta = sqrt(pi*f*mu*sigma).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

MU0 = 4e-7 * math.pi  # H/m
EPS0 = 8.8541878128e-12  # F/m
C0 = 299_792_458.0  # m/s

NP_TO_DB = 20.0 / math.log(10.0)  # field-amplitude convention, ~8.686

# Below this loss tangent the conduction current no longer dominates and the
# quasi-static form starts to drift from the full expression.
MIN_LOSS_TANGENT = 10.0


class QuasiStaticWarning(UserWarning):
    """sigma / (omega * eps) is small enough that dropping displacement current is questionable."""


@dataclass(frozen=True)
class ConductiveMedium:
    conductivity: float  # S/m
    permeability: float = MU0  # H/m
    relative_permittivity: float = 80.0
    label: str = ""

    def __post_init__(self):
        if not self.conductivity > 0:
            raise DomainError(f"conductivity must be > 0 S/m, got {self.conductivity}")
        if not self.permeability > 0:
            raise DomainError(f"permeability must be > 0 H/m, got {self.permeability}")
        if not self.relative_permittivity >= 1:
            raise DomainError(f"relative permittivity must be >= 1, got {self.relative_permittivity}")

    def loss_tangent(self, frequency):
        """sigma / (omega * eps0 * eps_r); large values mean conduction dominates."""
        f = _check_frequency(frequency)
        return self.conductivity / (2 * np.pi * f * EPS0 * self.relative_permittivity)


FRESHWATER = ConductiveMedium(conductivity=0.0097, label="freshwater")
SALTWATER = ConductiveMedium(conductivity=4.818, label="saltwater")


@dataclass(frozen=True)
class PropagationConstants:
    attenuation_alpha: float  # Np/m
    phase_beta: float  # rad/m
    frequency: float  # Hz
    quasi_static_ok: bool = True


@dataclass(frozen=True)
class FieldRegions:
    reactive_near_limit: float  # m, lambda / 2pi
    radiative_near_limit: float  # m, lambda
    transition_limit: float  # m, 2 lambda; far field beyond


def _check_frequency(frequency):
    f = np.asarray(frequency, dtype=float)
    if not np.all(np.isfinite(f)) or np.any(f <= 0):
        raise DomainError(f"frequency must be finite and > 0 Hz, got {frequency}")
    return f if f.ndim else float(f)


def _beta(medium: ConductiveMedium, frequency):
    f = _check_frequency(frequency)
    return np.sqrt(np.pi * f * medium.permeability * medium.conductivity)


def propagation_constants(medium: ConductiveMedium, frequency: float) -> PropagationConstants:
    """Attenuation and phase constants, alpha == beta == sqrt(pi f mu sigma).

    Emits :class:`QuasiStaticWarning` when the loss tangent falls below
    ``MIN_LOSS_TANGENT``; the values are still returned.
    """
    beta = float(_beta(medium, frequency))
    ok = bool(medium.loss_tangent(frequency) >= MIN_LOSS_TANGENT)
    if not ok:
        warnings.warn(
            f"loss tangent {medium.loss_tangent(frequency):.3g} < {MIN_LOSS_TANGENT} at "
            f"{frequency} Hz; low-frequency approximation degrades",
            QuasiStaticWarning,
            stacklevel=2,
        )
    return PropagationConstants(beta, beta, float(frequency), ok)


def wavelength(medium: ConductiveMedium, frequency):
    """lambda = 2 pi / beta. Accepts scalar or array frequency."""
    return 2 * np.pi / _beta(medium, frequency)


def skin_depth(medium: ConductiveMedium, frequency):
    return 1.0 / _beta(medium, frequency)


def attenuation_db_per_m(medium: ConductiveMedium, frequency):
    """Field-amplitude attenuation in dB/m (alpha * 20/ln 10)."""
    return _beta(medium, frequency) * NP_TO_DB


def field_regions(medium: ConductiveMedium, frequency: float) -> FieldRegions:
    lam = float(wavelength(medium, frequency))
    return FieldRegions(lam / (2 * math.pi), lam, 2 * lam)


def free_space_wavelength(frequency):
    return C0 / _check_frequency(frequency)
