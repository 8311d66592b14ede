"""Plain-text file formats and the synthetic reference dataset.

Spectrum file::

    # distance_m=8
    # noise_floor_dbv=-91
    frequency_hz,level_dbv
    31000,-85.2
    ...

Range file::

    distance_m,peak_snr_db,peak_frequency_hz,flag
    730,12,34629.26,noisefloor_shift

Config file: ``section.key = value`` lines, ``#`` comments, unknown keys
rejected.

Writers are byte-deterministic: ``\\n`` line endings, ``.`` decimal point,
6 significant digits, except frequency columns which carry 10 so that
sub-hertz tone positions near 35 kHz survive a round trip.
"""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence, TextIO

import numpy as np

from .antenna import ArraySpec, Resonator, Wiring
from .capacity import DEFAULT_NOISE_FLOOR_DBV, SnrSpectrum, resample_uniform
from .errors import ConfigError, DomainError, ParseError
from .link_budget import FLAGS, LinkScaling, PathLossModel, RangeSample, predict_snr
from .medium import ConductiveMedium
from .modem import BfskConfig

SPECTRUM_HEADER = "frequency_hz,level_dbv"
RANGE_HEADER = "distance_m,peak_snr_db,peak_frequency_hz,flag"

Source = str | os.PathLike | TextIO


def fmt(x: float) -> str:
    return f"{float(x):.6g}"


def fmt_freq(x: float) -> str:
    return f"{float(x):.10g}"


def _read(source: Source) -> tuple[str, str]:
    if hasattr(source, "read"):
        return source.read(), getattr(source, "name", "<stream>")
    path = Path(source)
    try:
        return path.read_text(encoding="utf-8"), str(path)
    except FileNotFoundError:
        raise ParseError(f"no such file: {path}", source=str(path)) from None
    except IsADirectoryError:
        raise ParseError(f"is a directory: {path}", source=str(path)) from None


def _write(text: str, dest: Source) -> None:
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _number(token: str, lineno: int, source: str, what: str) -> float:
    try:
        v = float(token)
    except ValueError:
        raise ParseError(f"{what}: not a number: {token!r}", lineno, source) from None
    if not math.isfinite(v):
        raise ParseError(f"{what}: non-finite value {token!r}", lineno, source)
    return v


def _split_lines(text: str, header: str, source: str):
    """Yield (lineno, fields) of data rows and collect ``# key=value`` metadata."""
    meta: dict[str, str] = {}
    rows = []
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body and not seen_header:
                k, v = body.split("=", 1)
                meta[k.strip()] = v.strip()
            continue
        if not seen_header:
            if line.replace(" ", "") != header:
                raise ParseError(f"expected header {header!r}, got {line!r}", lineno, source)
            seen_header = True
            continue
        rows.append((lineno, [f.strip() for f in line.split(",")]))
    if not seen_header:
        raise ParseError(f"missing header {header!r}", source=source)
    return meta, rows


def _meta_lines(meta: Mapping[str, Any]) -> list[str]:
    return [f"# {k}={v}" for k, v in meta.items()]


# -- spectra ------------------------------------------------------------------

@dataclass
class SpectrumFile:
    frequency_hz: np.ndarray
    level_dbv: np.ndarray
    metadata: dict[str, str] = field(default_factory=dict)

    @property
    def noise_floor_dbv(self) -> float:
        return float(self.metadata.get("noise_floor_dbv", DEFAULT_NOISE_FLOOR_DBV))

    @property
    def distance_m(self) -> float | None:
        d = self.metadata.get("distance_m")
        return None if d is None else float(d)

    def to_spectrum(self) -> SnrSpectrum:
        """Uniform-grid SNR spectrum; non-uniform grids are resampled in dB."""
        start, df, levels = resample_uniform(self.frequency_hz, self.level_dbv)
        return SnrSpectrum.from_levels(start, df, levels, self.noise_floor_dbv)


def loads_spectrum_file(text: str, source: str = "<string>") -> SpectrumFile:
    meta, rows = _split_lines(text, SPECTRUM_HEADER, source)
    freqs, levels = [], []
    for lineno, fields in rows:
        if len(fields) != 2:
            raise ParseError(f"expected 2 fields, got {len(fields)}", lineno, source)
        f = _number(fields[0], lineno, source, "frequency_hz")
        v = _number(fields[1], lineno, source, "level_dbv")
        if freqs and f <= freqs[-1]:
            raise ParseError(f"frequency {f:g} Hz does not increase (previous {freqs[-1]:g} Hz)",
                             lineno, source)
        freqs.append(f)
        levels.append(v)
    if "noise_floor_dbv" in meta:
        try:
            float(meta["noise_floor_dbv"])
        except ValueError:
            raise ParseError(f"bad noise_floor_dbv {meta['noise_floor_dbv']!r}", source=source) from None
    return SpectrumFile(np.array(freqs), np.array(levels), meta)


def dumps_spectrum_file(sf: SpectrumFile) -> str:
    lines = _meta_lines(sf.metadata) + [SPECTRUM_HEADER]
    lines += [f"{fmt_freq(f)},{fmt(v)}" for f, v in zip(sf.frequency_hz, sf.level_dbv)]
    return "\n".join(lines) + "\n"


def read_spectrum_file(source: Source) -> SpectrumFile:
    text, name = _read(source)
    return loads_spectrum_file(text, name)


def write_spectrum_file(sf: SpectrumFile, dest: Source) -> None:
    _write(dumps_spectrum_file(sf), dest)


def parse_spectrum(source: Source) -> SnrSpectrum:
    sf = read_spectrum_file(source)
    if sf.frequency_hz.size < 2:
        raise ParseError("spectrum needs at least two frequency points", source=str(source))
    return sf.to_spectrum()


# -- range sweeps ---------------------------------------------------------------

@dataclass
class RangeFile:
    samples: list[RangeSample]
    metadata: dict[str, str] = field(default_factory=dict)


def loads_range_file(text: str, source: str = "<string>") -> RangeFile:
    meta, rows = _split_lines(text, RANGE_HEADER, source)
    samples = []
    for lineno, fields in rows:
        if len(fields) != 4:
            raise ParseError(f"expected 4 fields, got {len(fields)}", lineno, source)
        d = _number(fields[0], lineno, source, "distance_m")
        snr = _number(fields[1], lineno, source, "peak_snr_db")
        # frequency and flag may be left blank
        f = _number(fields[2], lineno, source, "peak_frequency_hz") if fields[2] else math.nan
        flag = fields[3] or "ok"
        if d <= 0:
            raise ParseError(f"distance must be > 0, got {fields[0]}", lineno, source)
        if flag not in FLAGS:
            raise ParseError(f"unknown flag {flag!r}; expected one of {', '.join(FLAGS)}", lineno, source)
        samples.append(RangeSample(d, snr, f, flag))
    return RangeFile(samples, meta)


def dumps_range_file(rf: RangeFile) -> str:
    lines = _meta_lines(rf.metadata) + [RANGE_HEADER]
    lines += [f"{fmt(s.distance)},{fmt(s.peak_snr)},"
              f"{fmt_freq(s.frequency_at_peak) if math.isfinite(s.frequency_at_peak) else ''},{s.flag}"
              for s in rf.samples]
    return "\n".join(lines) + "\n"


def read_range_file(source: Source) -> RangeFile:
    text, name = _read(source)
    return loads_range_file(text, name)


def write_range_file(rf: RangeFile, dest: Source) -> None:
    _write(dumps_range_file(rf), dest)


def parse_range(source: Source) -> list[RangeSample]:
    return read_range_file(source).samples


# -- config ---------------------------------------------------------------------

@dataclass(frozen=True)
class Config:
    conductivity_s_per_m: float = 0.0097
    relative_permittivity: float = 80.0
    f0_hz: float = 35.5e3
    q: float = 200.0
    r_resonance_ohm: float = 50.0
    c_static_f: float = 2e-9
    softening_hz_per_v2: float = 0.0
    n_tx: int = 15
    n_rx: int = 15
    center_hz: float = 34_629.26
    delta_f_hz: float = 100.0
    rb_bps: float = 100.0
    sample_rate: float = 1e6

    def medium(self) -> ConductiveMedium:
        return ConductiveMedium(self.conductivity_s_per_m, relative_permittivity=self.relative_permittivity)

    def resonator(self) -> Resonator:
        return Resonator(self.f0_hz, self.q, self.r_resonance_ohm, self.c_static_f, self.softening_hz_per_v2)

    def tx_array(self, wiring=Wiring.PARALLEL) -> ArraySpec:
        return ArraySpec.uniform(self.resonator(), self.n_tx, wiring)

    def bfsk(self) -> BfskConfig:
        return BfskConfig(self.center_hz, self.delta_f_hz, self.rb_bps, self.sample_rate)

    def override(self, **values) -> "Config":
        """Replace fields whose override is not None."""
        return dataclasses.replace(self, **{k: v for k, v in values.items() if v is not None})


CONFIG_KEYS = {
    "medium.conductivity_s_per_m": "conductivity_s_per_m",
    "medium.relative_permittivity": "relative_permittivity",
    "antenna.f0_hz": "f0_hz",
    "antenna.q": "q",
    "antenna.r_resonance_ohm": "r_resonance_ohm",
    "antenna.c_static_f": "c_static_f",
    "antenna.softening_hz_per_v2": "softening_hz_per_v2",
    "array.n_tx": "n_tx",
    "array.n_rx": "n_rx",
    "modem.center_hz": "center_hz",
    "modem.delta_f_hz": "delta_f_hz",
    "modem.rb_bps": "rb_bps",
    "modem.sample_rate": "sample_rate",
}
_INT_FIELDS = {"n_tx", "n_rx"}


def loads_config(text: str, source: str = "<string>") -> Config:
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'section.key = value', got {raw.strip()!r}", lineno, source)
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno, source)
        name = CONFIG_KEYS[key]
        if name in values:
            raise ConfigError(f"duplicate key {key!r}", lineno, source)
        try:
            values[name] = int(value) if name in _INT_FIELDS else float(value)
        except ValueError:
            raise ConfigError(f"{key}: bad value {value!r}", lineno, source) from None
        if name not in _INT_FIELDS and not math.isfinite(values[name]):
            raise ConfigError(f"{key}: non-finite value {value!r}", lineno, source)
    return Config(**values)


def dumps_config(cfg: Config) -> str:
    lines = []
    for key, name in CONFIG_KEYS.items():
        v = getattr(cfg, name)
        lines.append(f"{key} = {v if name in _INT_FIELDS else fmt_freq(v)}")
    return "\n".join(lines) + "\n"


def read_config(source: Source) -> Config:
    text, name = _read(source)
    return loads_config(text, name)


# -- key = value reports and CSV tables -----------------------------------------

def dumps_report(items: Mapping[str, Any]) -> str:
    out = []
    for k, v in items.items():
        if isinstance(v, bool) or isinstance(v, str):
            out.append(f"{k} = {str(v).lower() if isinstance(v, bool) else v}")
        elif isinstance(v, (int, np.integer)):
            out.append(f"{k} = {int(v)}")
        else:
            out.append(f"{k} = {fmt(v)}")
    return "\n".join(out) + "\n"


def dumps_table(header: Sequence[str], rows: Iterable[Sequence[Any]],
                freq_columns: Iterable[str] = ()) -> str:
    freq_idx = {i for i, h in enumerate(header) if h in set(freq_columns)}
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for i, v in enumerate(row):
            if isinstance(v, str):
                cells.append(v)
            elif isinstance(v, (bool, np.bool_)):
                cells.append("true" if v else "false")
            elif isinstance(v, (int, np.integer)):
                cells.append(str(int(v)))
            else:
                cells.append(fmt_freq(v) if i in freq_idx else fmt(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def model_report(model: PathLossModel) -> dict[str, Any]:
    out: dict[str, Any] = {"segments": len(model.segments)}
    for i, s in enumerate(model.segments):
        out[f"segment.{i}.r_min_m"] = s.r_min
        out[f"segment.{i}.r_max_m"] = s.r_max
        out[f"segment.{i}.exponent"] = s.exponent
        out[f"segment.{i}.level_at_rmin_db"] = s.level_at_rmin
    out["noise_floor_db"] = model.noise_floor
    out["rms_residual_db"] = model.rms_residual
    out["excluded_samples"] = len(model.excluded)
    return out


def link_report(scaling: LinkScaling) -> dict[str, Any]:
    return {
        "rad_resistance_ratio": scaling.rad_resistance_ratio,
        "tx_array_power_gain": scaling.tx_array_power_gain,
        "rx_array_gain": scaling.rx_array_gain,
        "total_link_factor": scaling.total_link_factor,
        "total_link_db": scaling.total_link_db,
        "total_link_db_power": scaling.total_link_db_power,
    }


# -- synthetic reference data ---------------------------------------------------

# Steep near-field decay out to 15 m, then roughly 1/r, as seen in the
# saltwater range sweep.
REFERENCE_MODEL = PathLossModel.from_exponents(2.0, 730.0, [15.0], [4.0, 1.0], level_at_rmin=60.0)
REFERENCE_CONFIG = Config(conductivity_s_per_m=4.818)


def lorentzian_db(frequency, f0: float, q: float):
    """Power Lorentzian of a resonance, 0 dB at f0."""
    x = 2 * q * (np.asarray(frequency, dtype=float) - f0) / f0
    return -10 * np.log10(1 + x**2)


def synth_dataset(model: PathLossModel = REFERENCE_MODEL, config: Config = REFERENCE_CONFIG,
                  seed: int = 0, *, distances: Sequence[float] | None = None, jitter_db: float = 1.0,
                  f_lo: float = 31e3, f_hi: float = 41e3, delta_f: float = 10.0,
                  noise_floor_dbv: float = DEFAULT_NOISE_FLOOR_DBV) -> tuple[list[SpectrumFile], RangeFile]:
    """Received spectra and a range sweep drawn from a path-loss model.

    Each distance gets one Gaussian level offset (std ``jitter_db``) applied to
    its peak SNR; the spectrum is a Lorentzian at the configured resonance
    sitting that far above the noise floor. ``jitter_db=0`` reproduces the
    model exactly.
    """
    if jitter_db < 0:
        raise DomainError(f"jitter must be >= 0 dB, got {jitter_db}")
    if distances is None:
        lo, hi = model.span
        distances = np.geomspace(lo, hi, 40)
    distances = np.asarray(distances, dtype=float)
    rng = np.random.default_rng(seed)
    offsets = rng.normal(0.0, jitter_db, distances.size) if jitter_db > 0 else np.zeros(distances.size)
    peaks = np.asarray(predict_snr(model, distances, extrapolate=True)) + offsets

    n = int(round((f_hi - f_lo) / delta_f)) + 1
    freqs = f_lo + delta_f * np.arange(n)
    shape = lorentzian_db(freqs, config.f0_hz, config.q)
    spectra = []
    for d, p in zip(distances, peaks):
        meta = {
            "distance_m": fmt(d),
            "noise_floor_dbv": fmt(noise_floor_dbv),
            "medium_conductivity_s_per_m": fmt(config.conductivity_s_per_m),
            "seed": str(seed),
        }
        spectra.append(SpectrumFile(freqs.copy(), noise_floor_dbv + p + shape, meta))
    samples = [RangeSample(float(d), float(p), config.f0_hz, "ok") for d, p in zip(distances, peaks)]
    range_meta = {"seed": str(seed), "jitter_db": fmt(jitter_db)}
    return spectra, RangeFile(samples, range_meta)


def write_dataset(spectra: Sequence[SpectrumFile], rf: RangeFile, directory: str | os.PathLike) -> list[Path]:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for i, sf in enumerate(spectra):
        p = out / f"spectrum_{i:03d}.csv"
        write_spectrum_file(sf, p)
        written.append(p)
    p = out / "range.csv"
    write_range_file(rf, p)
    written.append(p)
    return written
