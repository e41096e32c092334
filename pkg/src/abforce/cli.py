"""``abforce`` command line entry point.

Exit codes: 0 success, 2 configuration error, 3 numerical non-convergence,
4 regime violation.  Failures also print a one-line JSON error record to
stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from .config import FORMATS, MODES, keys_help, parse_config
from .core import PerturbativeWarning
from .errors import AbforceError, ConfigError
from .report import run


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="abforce",
        description="Electron passing a magnetic dipole: fields, forces, path shift and phase, trajectories, fringes.",
        epilog=keys_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("mode", choices=MODES, help="what to compute")
    p.add_argument("--config", required=True, help="scenario file (TOML)")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=FORMATS, help="csv or json (default: from --out suffix, else csv)")
    p.add_argument("--points", type=int, help="override run sweep.points")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized sampling (default 0)")
    p.add_argument("--workers", type=int, default=1, help="process pool size for sweeps")
    return p


def _error_record(exc: Exception, code: int) -> str:
    rec = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, ConfigError):
        rec.update({k: v for k, v in (("key", exc.key), ("line", exc.line), ("column", exc.column)) if v is not None})
    return json.dumps(rec)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fmt = args.format
    if fmt is None:
        fmt = "json" if args.out and args.out.endswith(".json") else "csv"
    try:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        cfg = parse_config(text, mode=args.mode, output_format=fmt, output_path=args.out,
                           seed=args.seed, points=args.points)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PerturbativeWarning)
            out = run(cfg, workers=args.workers)
    except AbforceError as exc:
        print(_error_record(exc, exc.exit_code), file=sys.stderr)
        return exc.exit_code
    if not args.out:
        try:
            sys.stdout.write(out)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader closed early (e.g. piped into head); not an error for us
            sys.stderr.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
