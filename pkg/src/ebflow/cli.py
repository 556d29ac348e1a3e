"""Command-line entry point: ``ebflow <scenario> --config <path> [--mesh N,...] [--out DIR]``."""
from __future__ import annotations

import argparse
import logging
import sys

from .errors import ConfigError, NumericalError
from .harness.config import SCENARIOS, RunConfig, load_config

log = logging.getLogger("ebflow")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def _meshes(text: str):
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError as exc:
        raise ConfigError(f"bad mesh list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ebflow", description=__doc__)
    ap.add_argument("scenario", choices=SCENARIOS)
    ap.add_argument("--config", help="flat 'key = value' config file")
    ap.add_argument("--mesh", help="comma-separated mesh sizes, overriding the config")
    ap.add_argument("--out", help="output directory, overriding the config")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    from .harness.scenarios import run
    try:
        overrides = {"scenario": args.scenario, "output_dir": args.out,
                     "meshes": _meshes(args.mesh) if args.mesh else None}
        if args.config:
            config = load_config(args.config, **overrides)
        else:
            config = RunConfig(**{k: v for k, v in overrides.items() if v is not None})
        rows = run(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for row in rows:
        print(", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in row.items()))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
