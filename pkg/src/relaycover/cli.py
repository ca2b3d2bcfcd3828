"""Command-line experiment runner."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ConfigError, ScenarioConfig, load_config
from .runner import run_experiment


def _parse_args(argv=None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="relaycover",
        description="Run relay-coverage swarm experiments from a scenario config.",
    )
    parser.add_argument("config", help="path to the scenario YAML")
    parser.add_argument("-o", "--out", default="out", help="output directory (default: ./out)")
    parser.add_argument("--seeds", help="comma-separated seed override, e.g. 1,2,3")
    parser.add_argument("--betas", help="comma-separated beta override, e.g. 0,0.5,1")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="errors only")
    return parser.parse_args(argv)


def _apply_overrides(cfg: ScenarioConfig, args: argparse.Namespace) -> ScenarioConfig:
    from dataclasses import replace

    try:
        if args.seeds:
            cfg = replace(cfg, seeds=tuple(int(s) for s in args.seeds.split(",")))
        if args.betas:
            betas = tuple(float(b) for b in args.betas.split(","))
            if any(b < 0 for b in betas):
                raise ValueError("betas must be non-negative")
            cfg = replace(cfg, betas=betas)
    except ValueError as exc:
        raise ConfigError([f"override: {exc}"]) from exc
    return cfg


def main(argv=None) -> int:
    args = _parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.ERROR if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(message)s")

    try:
        cfg = _apply_overrides(load_config(args.config), args)
    except FileNotFoundError:
        print(f"config file not found: {args.config}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2

    results = run_experiment(cfg, Path(args.out))
    if not args.quiet:
        print(f"wrote {len(results)} run(s) under {args.out}/ (comparison.csv at the top level)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
