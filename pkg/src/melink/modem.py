"""Binary FSK over AWGN with a noncoherent tone-energy detector.

Bit 0 is sent on f1 = fc - df/2 and bit 1 on f2 = fc + df/2. The detector
takes a single-bin DFT at each tone over every bit window (rectangular
window, T_b long) and picks the larger magnitude. With df a multiple of the
bit rate the tones are orthogonal over a bit and the error rate follows
P_b = 1/2 exp(-Eb / 2N0).

Monte Carlo runs split the bit budget into fixed-size blocks. Block ``i``
draws both its bits and its noise from child ``i`` of
``numpy.random.SeedSequence(seed)``, so a result depends only on
(config, snr, n_bits, seed) and never on how blocks are scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.stats import binomtest

from .antenna import ArraySpec, transfer
from .capacity import SnrSpectrum
from .errors import DomainError

BLOCK_BITS = 20_000


@dataclass(frozen=True)
class BfskConfig:
    center_frequency: float = 34_629.26  # Hz
    tone_spacing_delta_f: float = 100.0  # Hz
    bit_rate_Rb: float = 100.0  # bit/s
    sample_rate: float = 1e6  # samples/s
    amplitude: float = 1.0
    orthogonal: bool = True
    phase_continuous: bool = True

    def __post_init__(self):
        for name in ("center_frequency", "tone_spacing_delta_f", "bit_rate_Rb", "sample_rate", "amplitude"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.f1 <= 0:
            raise DomainError(f"lower tone {self.f1} Hz is not positive")
        if not self.sample_rate > 2 * self.f2:
            raise DomainError(f"sample rate {self.sample_rate} does not exceed Nyquist for f2 = {self.f2} Hz")
        if self.orthogonal:
            k = self.tone_spacing_delta_f / self.bit_rate_Rb
            if k < 1 - 1e-9 or abs(k - round(k)) > 1e-9 * k:
                raise DomainError(
                    f"orthogonal signalling needs tone spacing = k * bit rate, k >= 1 integer; got {k:g}"
                )
        if self.sample_rate / self.bit_rate_Rb < 1:
            raise DomainError("bit rate exceeds sample rate")

    @property
    def f1(self) -> float:
        return self.center_frequency - self.tone_spacing_delta_f / 2

    @property
    def f2(self) -> float:
        return self.center_frequency + self.tone_spacing_delta_f / 2

    @property
    def bit_period(self) -> float:
        return 1.0 / self.bit_rate_Rb

    @property
    def samples_per_bit(self) -> float:
        return self.sample_rate / self.bit_rate_Rb

    def n_samples(self, n_bits: int) -> int:
        return int(math.ceil(n_bits * self.samples_per_bit - 1e-9))

    def bit_boundaries(self, n_bits: int) -> np.ndarray:
        """Start sample of each bit plus the end; bit k covers t in [k T_b, (k+1) T_b)."""
        k = np.arange(n_bits + 1)
        return np.ceil(k * self.samples_per_bit - 1e-9).astype(np.int64)


def modulate(config: BfskConfig, bits, phase_offset: float = 0.0) -> np.ndarray:
    """Real BFSK waveform at ``config.sample_rate``.

    Bit boundaries fall on the ideal bit times; a non-integer samples-per-bit
    is absorbed by letting bit lengths differ by one sample. ``phase_offset``
    (rad) rotates the carrier of the whole waveform.
    """
    bits = np.asarray(bits, dtype=np.int8).ravel()
    if bits.size == 0:
        return np.zeros(0)
    if np.any((bits != 0) & (bits != 1)):
        raise DomainError("bits must be 0 or 1")
    n = config.n_samples(bits.size)
    sample_bit = np.searchsorted(config.bit_boundaries(bits.size), np.arange(n), side="right") - 1
    freq = np.where(bits[sample_bit] == 1, config.f2, config.f1)
    if config.phase_continuous:
        phase = 2 * np.pi * np.concatenate([[0.0], np.cumsum(freq[:-1])]) / config.sample_rate
    else:
        phase = 2 * np.pi * freq * np.arange(n) / config.sample_rate
    return config.amplitude * np.cos(phase + phase_offset)


def add_awgn(waveform, snr_db: float, seed=None) -> np.ndarray:
    """Add white Gaussian noise at a per-sample SNR measured from the waveform.

    ``snr_db = inf`` returns a copy of the input untouched. ``seed`` may be
    an int, a SeedSequence or a Generator.
    """
    x = np.asarray(waveform, dtype=float)
    if math.isinf(snr_db) and snr_db > 0:
        return x.copy()
    if x.size == 0:
        return x.copy()
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    power = float(np.mean(x**2))
    sigma = math.sqrt(power / 10 ** (snr_db / 10))
    return x + sigma * rng.standard_normal(x.shape)


def tone_energies(config: BfskConfig, waveform) -> tuple[np.ndarray, np.ndarray, int]:
    """Per-bit |DFT|^2 at f1 and f2, plus the number of trailing samples discarded."""
    x = np.asarray(waveform, dtype=float)
    n_bits = int(math.floor(x.size / config.samples_per_bit + 1e-9))
    if n_bits == 0:
        raise DomainError("waveform is shorter than one bit period")
    edges = config.bit_boundaries(n_bits)
    used = int(edges[-1])
    t = np.arange(used) / config.sample_rate
    out = []
    for f in (config.f1, config.f2):
        y = x[:used] * np.exp(-2j * np.pi * f * t)
        out.append(np.abs(np.add.reduceat(y, edges[:-1])) ** 2)
    return out[0], out[1], x.size - used


class Demodulated(NamedTuple):
    bits: np.ndarray
    discarded_samples: int


def demodulate_noncoherent(config: BfskConfig, waveform) -> Demodulated:
    """Energy comparison per bit window; equal energies decide 0."""
    e1, e2, discarded = tone_energies(config, waveform)
    return Demodulated((e2 > e1).astype(np.int8), discarded)


def ber_closed_form(snr_linear, bit_rate_Rb: float, tone_spacing: float):
    """Noncoherent BFSK error rate, 1/2 exp(-(SNR/2) (R_b/df))."""
    snr = np.asarray(snr_linear, dtype=float)
    if np.any(snr < 0):
        raise DomainError("SNR must be >= 0")
    if not (bit_rate_Rb > 0 and tone_spacing > 0):
        raise DomainError("bit rate and tone spacing must be > 0")
    p = 0.5 * np.exp(-0.5 * snr * bit_rate_Rb / tone_spacing)
    return float(p) if p.ndim == 0 else p


def sample_snr_db(config: BfskConfig, snr_db: float) -> float:
    """Per-sample SNR giving in-band SNR ``snr_db`` in a noise bandwidth equal to the tone spacing.

    White noise of variance s^2 at rate fs has one-sided density 2 s^2 / fs,
    so the in-band SNR is P / (2 s^2 df / fs).
    """
    return snr_db + 10 * math.log10(2 * config.tone_spacing_delta_f / config.sample_rate)


@dataclass(frozen=True)
class BerResult:
    bit_errors: int
    bits_sent: int
    ber_estimate: float
    wilson_95_interval: tuple[float, float]
    seed: int


def wilson_interval(errors: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    ci = binomtest(int(errors), int(n)).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def apply_antenna(waveform, array: ArraySpec, sample_rate: float, drive_amplitude: float = 0.0) -> np.ndarray:
    """Filter a real waveform through the array's normalized motional response."""
    x = np.asarray(waveform, dtype=float)
    spec = np.fft.rfft(x)
    f = np.fft.rfftfreq(x.size, 1.0 / sample_rate)
    h = np.zeros_like(spec)
    h[1:] = transfer(array, f[1:], drive_amplitude)
    return np.fft.irfft(spec * h, n=x.size)


def _run_block(config: BfskConfig, sample_snr: float, n_bits: int, seq: np.random.SeedSequence,
               antenna: ArraySpec | None) -> int:
    rng = np.random.default_rng(seq)
    bits = rng.integers(0, 2, n_bits, dtype=np.int8)
    x = modulate(config, bits)
    if antenna is not None:
        x = apply_antenna(x, antenna, config.sample_rate)
    y = add_awgn(x, sample_snr, rng)
    if antenna is not None:
        y = apply_antenna(y, antenna, config.sample_rate)
    decided = demodulate_noncoherent(config, y).bits
    return int(np.count_nonzero(decided != bits[: decided.size]))


def ber_monte_carlo(config: BfskConfig, snr_db: float, n_bits: int, seed: int = 0, *,
                    antenna: ArraySpec | None = None, workers: int = 1) -> BerResult:
    """Simulated error rate at in-band SNR ``snr_db`` (noise bandwidth = tone spacing).

    At df = R_b the in-band SNR equals Eb/N0. ``antenna`` (off by default)
    passes the signal through the transmit and receive array response.
    """
    if n_bits < 1000:
        raise DomainError(f"need at least 1000 bits, got {n_bits}")
    per_sample = sample_snr_db(config, snr_db)
    sizes = [BLOCK_BITS] * (n_bits // BLOCK_BITS)
    if n_bits % BLOCK_BITS:
        sizes.append(n_bits % BLOCK_BITS)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    args = [(config, per_sample, s, q, antenna) for s, q in zip(sizes, seqs)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            errors = sum(pool.map(lambda a: _run_block(*a), args))
    else:
        errors = sum(_run_block(*a) for a in args)
    return BerResult(errors, n_bits, errors / n_bits, wilson_interval(errors, n_bits), seed)


class MaxBitrate(NamedTuple):
    bit_rate: float  # bit/s
    capped: bool  # True when the orthogonality cap R_b <= df was hit
    snr_linear: float  # min SNR of the two tones


def max_bitrate_for_ber(spectrum: SnrSpectrum, target_ber: float, tone_spacing: float,
                        center_frequency: float) -> MaxBitrate:
    """Highest bit rate meeting ``target_ber`` with tones at fc +- df/2.

    The SNR used is the smaller of the two tone SNRs. Solving
    1/2 exp(-(SNR/2) df/R_b) = P_b for R_b gives R_b = SNR df / (2 ln(1/(2 P_b))),
    which meets the closed form at R_b = df and is capped there.
    """
    if not 0 < target_ber <= 0.5:
        raise DomainError(f"target BER must lie in (0, 0.5], got {target_ber}")
    if not tone_spacing > 0:
        raise DomainError(f"tone spacing must be > 0, got {tone_spacing}")
    f1 = center_frequency - tone_spacing / 2
    f2 = center_frequency + tone_spacing / 2
    snr = float(min(spectrum.snr_at(f1), spectrum.snr_at(f2)))
    need = 2 * math.log(1 / (2 * target_ber))
    if need == 0:
        return MaxBitrate(tone_spacing, True, snr)
    rb = snr * tone_spacing / need
    if rb >= tone_spacing:
        return MaxBitrate(tone_spacing, True, snr)
    return MaxBitrate(rb, False, snr)


class BerRow(NamedTuple):
    label: str
    distance_m: float
    tone_spacing_hz: float
    bit_rate_bps: float
    snr_linear: float
    ber: float


def ber_vs_distance(spectra: Sequence[tuple[float, SnrSpectrum]], tone_spacings: Sequence[float],
                    center_frequency: float) -> list[BerRow]:
    """Closed-form BER at R_b = df for each (distance, spectrum) and tone spacing.

    Rows whose tones fall outside a spectrum are skipped.
    """
    rows = []
    for distance, spec in spectra:
        for df in tone_spacings:
            try:
                snr = min(spec.snr_at(center_frequency - df / 2), spec.snr_at(center_frequency + df / 2))
            except DomainError:
                continue
            rows.append(BerRow("", float(distance), float(df), float(df), float(snr),
                               ber_closed_form(snr, df, df)))
    return rows
