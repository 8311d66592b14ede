"""Command-line front end.

Exit codes: 0 success, 1 domain error (inputs outside a model's range),
2 usage or parse error (bad flags, unreadable or malformed files).
"""

from __future__ import annotations

import argparse
import sys
import warnings

import numpy as np

from . import antenna, capacity, data_io, link_budget, medium, modem
from .errors import DomainError, ParseError


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args, base: data_io.Config | None = None) -> data_io.Config:
    if args.config:
        cfg = data_io.read_config(args.config)
    else:
        cfg = base or data_io.Config()
    return cfg.override(
        conductivity_s_per_m=args.conductivity,
        relative_permittivity=args.relative_permittivity,
        f0_hz=args.f0,
        q=args.q,
        r_resonance_ohm=args.r_resonance,
        c_static_f=args.c_static,
        softening_hz_per_v2=args.softening,
        n_tx=args.n_tx,
        n_rx=args.n_rx,
        center_hz=args.center_hz,
        delta_f_hz=args.delta_f_hz,
        rb_bps=args.rb_bps,
        sample_rate=args.sample_rate,
    )


def cmd_medium(args) -> str:
    cfg = _config(args)
    med = cfg.medium()
    rows = []
    freqs = args.frequency or [36e3]
    for f in freqs:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", medium.QuasiStaticWarning)
            pc = medium.propagation_constants(med, f)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        reg = medium.field_regions(med, f)
        rows.append((f, med.conductivity, medium.wavelength(med, f), pc.attenuation_alpha,
                     medium.attenuation_db_per_m(med, f), reg.reactive_near_limit,
                     reg.radiative_near_limit, reg.transition_limit, pc.quasi_static_ok))
    header = ("frequency_hz", "conductivity_s_per_m", "wavelength_m", "alpha_np_per_m",
              "attenuation_db_per_m", "reactive_near_m", "radiative_near_m", "transition_m",
              "quasi_static_ok")
    return data_io.dumps_table(header, rows, freq_columns=("frequency_hz",))


def cmd_resonance(args) -> str:
    spec = antenna.LaminateSpec(
        length_L=args.length, young_pzt=args.young_pzt, young_metglas=args.young_metglas,
        vol_frac_pzt=args.vol_frac_pzt, vol_frac_metglas=1.0 - args.vol_frac_pzt,
        density_pzt=args.density_pzt, density_metglas=args.density_metglas,
    )
    return data_io.dumps_report({"resonance_hz": antenna.resonance_frequency(spec)})


def cmd_impedance(args) -> str:
    cfg = _config(args)
    res = cfg.resonator()
    wiring = antenna.Wiring(args.wiring)
    if args.f0_jitter > 0:
        arr = antenna.ArraySpec.jittered(res, args.n_elements, wiring, f0_jitter=args.f0_jitter, seed=args.seed)
    else:
        arr = antenna.ArraySpec.uniform(res, args.n_elements, wiring)
    f = np.linspace(args.f_start, args.f_stop, args.points)
    z = antenna.array_impedance(arr, f, args.drive)
    resp = antenna.frequency_response(arr, f, args.drive)
    rows = zip(f, z.real, z.imag, np.abs(z), np.degrees(np.angle(z)), resp.gain,
               np.degrees(resp.phase), resp.group_delay)
    header = ("frequency_hz", "z_real_ohm", "z_imag_ohm", "z_mag_ohm", "z_phase_deg",
              "gain", "phase_deg", "group_delay_s")
    return data_io.dumps_table(header, rows, freq_columns=("frequency_hz",))


def cmd_link(args) -> str:
    cfg = _config(args)
    ratio = args.medium_ratio
    if ratio is None:
        ratio = link_budget.radiation_resistance_ratio_air_to(cfg.medium(), args.frequency)
    scaling = link_budget.total_link_budget(ratio, cfg.n_tx, cfg.n_rx, args.efficiency)
    return data_io.dumps_report(data_io.link_report(scaling))


def cmd_fit(args) -> str:
    samples = data_io.parse_range(args.range)
    exclude = link_budget.flagged_mask(samples) if args.exclude_flagged else None
    breakpoints = args.breakpoint
    if breakpoints is None:
        cfg = _config(args)
        reg = medium.field_regions(cfg.medium(), args.frequency)
        lo = min(s.distance for s in samples)
        hi = max(s.distance for s in samples)
        breakpoints = [b for b in (reg.reactive_near_limit, reg.radiative_near_limit, reg.transition_limit)
                       if lo < b < hi]
    model = link_budget.fit_path_loss(samples, breakpoints, exclude)
    return data_io.dumps_report(data_io.model_report(model))


def cmd_ber(args) -> str:
    cfg = _config(args)
    if args.spectrum:
        pairs = []
        for i, path in enumerate(args.spectrum):
            sf = data_io.read_spectrum_file(path)
            dist = sf.distance_m if sf.distance_m is not None else float(i)
            pairs.append((dist, sf.to_spectrum()))
        pairs.sort(key=lambda p: p[0])
        spacings = args.tone_spacing or [10.0, 100.0, 1000.0]
        rows = modem.ber_vs_distance(pairs, spacings, cfg.center_hz)
        header = ("distance_m", "tone_spacing_hz", "bit_rate_bps", "snr_min_linear", "ber")
        return data_io.dumps_table(header, [r[1:] for r in rows], freq_columns=("tone_spacing_hz",))

    bfsk = cfg.bfsk()
    rows = []
    for snr_db in args.snr_db or [4.0, 7.0, 10.0]:
        theory = modem.ber_closed_form(10 ** (snr_db / 10), bfsk.bit_rate_Rb, bfsk.tone_spacing_delta_f)
        res = modem.ber_monte_carlo(bfsk, snr_db, args.bits, args.seed, workers=args.workers)
        lo, hi = res.wilson_95_interval
        rows.append((snr_db, theory, res.ber_estimate, lo, hi, res.bit_errors, res.bits_sent))
    header = ("snr_db", "ber_theory", "ber_mc", "wilson_lo", "wilson_hi", "bit_errors", "bits_sent")
    return data_io.dumps_table(header, rows)


def cmd_capacity(args) -> str:
    spec = data_io.parse_spectrum(args.spectrum)
    if args.f_lo is not None or args.f_hi is not None:
        f_lo = spec.start_frequency if args.f_lo is None else args.f_lo
        f_hi = spec.stop_frequency if args.f_hi is None else args.f_hi
        return data_io.dumps_report({
            "f_lo_hz": f_lo, "f_hi_hz": f_hi,
            "capacity_bits_per_s": capacity.capacity_band(spec, f_lo, f_hi),
        })
    f, c = capacity.capacity_cumulative(spec)
    return data_io.dumps_table(("frequency_hz", "cumulative_bits_per_s"), zip(f, c),
                               freq_columns=("frequency_hz",))


def cmd_synth(args) -> str:
    cfg = _config(args, base=data_io.REFERENCE_CONFIG)
    spectra, rf = data_io.synth_dataset(data_io.REFERENCE_MODEL, cfg, args.seed, jitter_db=args.jitter_db)
    if args.out_dir:
        paths = data_io.write_dataset(spectra, rf, args.out_dir)
        return "".join(f"{p}\n" for p in paths)
    return data_io.dumps_range_file(rf)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration (overrides win over --config)")
    g.add_argument("--config", help="section.key = value config file")
    g.add_argument("--conductivity", type=float, help="medium.conductivity_s_per_m")
    g.add_argument("--relative-permittivity", type=float, help="medium.relative_permittivity")
    g.add_argument("--f0", type=float, help="antenna.f0_hz")
    g.add_argument("--q", type=float, help="antenna.q")
    g.add_argument("--r-resonance", type=float, help="antenna.r_resonance_ohm")
    g.add_argument("--c-static", type=float, help="antenna.c_static_f")
    g.add_argument("--softening", type=float, help="antenna.softening_hz_per_v2")
    g.add_argument("--n-tx", type=int, help="array.n_tx")
    g.add_argument("--n-rx", type=int, help="array.n_rx")
    g.add_argument("--center-hz", type=float, help="modem.center_hz")
    g.add_argument("--delta-f-hz", type=float, help="modem.delta_f_hz")
    g.add_argument("--rb-bps", type=float, help="modem.rb_bps")
    g.add_argument("--sample-rate", type=float, help="modem.sample_rate")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="melink", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--out", help="write output here instead of stdout")
        _add_config_flags(p)
        return p

    p = add("medium", cmd_medium, "wavelength, attenuation and field regions")
    p.add_argument("--frequency", type=float, action="append", help="Hz; repeatable (default 36000)")

    p = add("resonance", cmd_resonance, "laminate longitudinal resonance")
    ref = antenna.REFERENCE_LAMINATE
    p.add_argument("--length", type=float, default=ref.length_L, help="m")
    p.add_argument("--young-pzt", type=float, default=ref.young_pzt, help="Pa")
    p.add_argument("--young-metglas", type=float, default=ref.young_metglas, help="Pa")
    p.add_argument("--vol-frac-pzt", type=float, default=ref.vol_frac_pzt)
    p.add_argument("--density-pzt", type=float, default=ref.density_pzt, help="kg/m^3")
    p.add_argument("--density-metglas", type=float, default=ref.density_metglas, help="kg/m^3")

    p = add("impedance", cmd_impedance, "array impedance and response sweep")
    p.add_argument("--n-elements", type=int, default=1)
    p.add_argument("--wiring", choices=[w.value for w in antenna.Wiring], default="parallel")
    p.add_argument("--drive", type=float, default=0.0, help="drive amplitude, V")
    p.add_argument("--f-start", type=float, default=antenna.VALID_BAND[0])
    p.add_argument("--f-stop", type=float, default=antenna.VALID_BAND[1])
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--f0-jitter", type=float, default=0.0, help="fractional +- spread of element f0")
    p.add_argument("--seed", type=int, default=0)

    p = add("link", cmd_link, "radiation-resistance and array link scaling")
    p.add_argument("--medium-ratio", type=float, help="R_rad ratio; default: air -> configured medium")
    p.add_argument("--frequency", type=float, default=36e3, help="Hz, for the default medium ratio")
    p.add_argument("--efficiency", type=float, default=1.0, help="array coupling efficiency in [0, 1]")

    p = add("fit", cmd_fit, "fit a piecewise path-loss model to a range file")
    p.add_argument("--range", required=True, help="range CSV")
    p.add_argument("--breakpoint", type=float, action="append",
                   help="m; repeatable (default: field-region radii inside the data span)")
    p.add_argument("--frequency", type=float, default=36e3, help="Hz, for default breakpoints")
    p.add_argument("--exclude-flagged", action="store_true", help="leave non-ok samples out of the fit")

    p = add("ber", cmd_ber, "BER vs distance from spectra, or Monte Carlo vs theory")
    p.add_argument("--spectrum", action="append", help="spectrum CSV; repeatable")
    p.add_argument("--tone-spacing", type=float, action="append", help="Hz; repeatable")
    p.add_argument("--snr-db", type=float, action="append", help="in-band SNR in dB; repeatable")
    p.add_argument("--bits", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    p = add("capacity", cmd_capacity, "cumulative Shannon capacity of a spectrum")
    p.add_argument("--spectrum", required=True, help="spectrum CSV")
    p.add_argument("--f-lo", type=float)
    p.add_argument("--f-hi", type=float)

    p = add("synth", cmd_synth, "generate the synthetic reference dataset")
    p.add_argument("--out-dir", help="directory for spectrum_*.csv and range.csv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jitter-db", type=float, default=1.0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _emit(args.func(args), args.out)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
