"""Fit the two-regime path-loss model to a range file and report capacity per spectrum."""

import argparse
from pathlib import Path

from melink.capacity import total_capacity
from melink.data_io import dumps_report, model_report, parse_range, read_spectrum_file
from melink.link_budget import fit_path_loss, flagged_mask


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", default=str(Path(__file__).resolve().parents[1] / "data" / "reference"))
    ap.add_argument("--breakpoint", type=float, nargs="*", default=[15.0])
    args = ap.parse_args()

    data = Path(args.data)
    samples = parse_range(data / "range.csv")
    model = fit_path_loss(samples, args.breakpoint, exclude=flagged_mask(samples))
    print(dumps_report(model_report(model)), end="")

    print("distance_m,capacity_bits_per_s")
    for p in sorted(data.glob("spectrum_*.csv")):
        sf = read_spectrum_file(p)
        print(f"{sf.distance_m:.6g},{total_capacity(sf.to_spectrum()):.6g}")


if __name__ == "__main__":
    main()
