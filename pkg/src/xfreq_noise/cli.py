"""Command-line front end.

    xfreq-noise run CONFIG [--out-dir DIR] [--threads N] [--seedless]
    xfreq-noise verify {pamp,tma,quadrature} [--quick] [--out-dir DIR] [--threads N] [--seedless]

Exit codes: 0 success, 1 config parse error, 2 validation error,
3 numerical failure (singular, non-convergent, or a verification tolerance missed).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .errors import NumericalError
from .output import emit_figure_data, write_json
from .scenarios import run_config, validate_config

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2, 3


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="xfreq-noise", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", type=Path, default=None, help="output directory (overrides config)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    common.add_argument("--seedless", action="store_true",
                        help="assert that no random number generator state is touched")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="run a scenario config")
    r.add_argument("config", type=Path)
    v = sub.add_parser("verify", parents=[common], help="cross-solver verification report")
    v.add_argument("target", choices=["pamp", "tma", "quadrature"])
    v.add_argument("--quick", action="store_true", help="reduced sample set")
    return ap


def load_config(path: Path) -> dict:
    with Path(path).open(encoding="utf-8") as fh:
        return json.load(fh)


def _rng_state():
    return random.getstate(), repr(np.random.get_state())


def execute(cfg: dict, out_dir: Path, threads: int = 1, seedless: bool = False) -> int:
    before = _rng_state() if seedless else None
    try:
        result = run_config(cfg, threads=threads)
    except NumericalError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if seedless and _rng_state() != before:
        print("error: random number generator state changed during a seedless run", file=sys.stderr)
        return EXIT_NUMERICAL
    paths = emit_figure_data(result.tables, out_dir)
    meta = {
        "tool": "xfreq-noise",
        "version": __version__,
        "config": cfg,
        "outputs": [p.name for p in paths],
        "diagnostics": result.diagnostics,
        "passed": result.passed,
    }
    # metadata is named after the primary table
    stem = next(iter(result.tables))
    write_json(out_dir / f"{stem}_meta.json", meta)
    for p in paths:
        print(p)
    if not result.passed:
        print("verification FAILED; see report", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_VALIDATION
    if args.command == "verify":
        cfg = {"scenario": "verify", "verify": {"target": args.target, "quick": args.quick}}
    else:
        try:
            cfg = load_config(args.config)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot parse {args.config}: {exc}", file=sys.stderr)
            return EXIT_PARSE
    try:
        validate_config(cfg)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        print(f"error: config invalid at {where}: {exc.message}", file=sys.stderr)
        return EXIT_VALIDATION
    out_dir = args.out_dir or Path(cfg.get("output", {}).get("dir", "out"))
    return execute(cfg, out_dir, threads=args.threads, seedless=args.seedless)


if __name__ == "__main__":
    sys.exit(main())
