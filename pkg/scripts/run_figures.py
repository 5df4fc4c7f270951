"""Regenerate every figure-analog table from the shipped configs."""

import argparse
import sys
from pathlib import Path

from xfreq_noise.cli import main as cli_main

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ["toy_flat.json", "toy_noisy.json", "tma_fig7.json", "pamp_fig5.json"]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, default=ROOT / "out")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--skip-pamp", action="store_true", help="skip the slow parametric loop sweep")
    args = ap.parse_args(argv)
    for name in CONFIGS:
        if args.skip_pamp and name.startswith("pamp"):
            continue
        rc = cli_main(["run", str(ROOT / "configs" / name), "--out-dir", str(args.out_dir / Path(name).stem),
                       "--threads", str(args.threads)])
        if rc:
            print(f"{name}: exit {rc}", file=sys.stderr)
            return rc
    return 0


if __name__ == "__main__":
    sys.exit(main())
