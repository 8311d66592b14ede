"""Write the bundled synthetic dataset: 40 spectra plus a range sweep.

    python scripts/make_reference_data.py [--out data/reference] [--seed 0]
"""

import argparse
from pathlib import Path

from melink.data_io import REFERENCE_CONFIG, REFERENCE_MODEL, dumps_config, synth_dataset, write_dataset


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "data" / "reference"))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jitter-db", type=float, default=1.0)
    args = ap.parse_args()

    spectra, rf = synth_dataset(REFERENCE_MODEL, REFERENCE_CONFIG, args.seed, jitter_db=args.jitter_db)
    paths = write_dataset(spectra, rf, args.out)
    cfg = Path(args.out) / "reference.cfg"
    cfg.write_text(dumps_config(REFERENCE_CONFIG), encoding="utf-8")
    print(f"wrote {len(paths) + 1} files to {args.out}")


if __name__ == "__main__":
    main()
