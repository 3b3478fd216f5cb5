"""Command-line entry point.

Exit codes: 0 success, 2 validation error, 3 resource guard.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from ..errors import ConfigError, RelaxometerError, ResourceGuardError
from .config import ExperimentConfig, list_scenarios
from .emit import emit
from .engine import run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOURCE = 3

WORKERS_ENV = "RELAXOMETER_WORKERS"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaxometer",
        description="Subsystem evolution speeds and distances for spin chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a sweep scenario")
    run.add_argument("--config", required=True, help="YAML config file")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--workers", type=int, default=None)
    run.add_argument("--seed", type=int, default=None, help="override base_seed")
    run.add_argument("--format", choices=("csv", "json"), default="csv")

    sub.add_parser("list-scenarios", help="list known scenarios")

    val = sub.add_parser("validate", help="validate a config file")
    val.add_argument("--config", required=True)
    return parser


def _resolve_workers(cli_value, cfg: ExperimentConfig) -> int:
    if cli_value is not None:
        return cli_value
    env = os.environ.get(WORKERS_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV}={env!r} is not an integer")
    return cfg.workers


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "list-scenarios":
            for name, desc in list_scenarios():
                print(f"{name:22s} {desc}")
            return EXIT_OK
        if args.command == "validate":
            cfg = ExperimentConfig.load(args.config)
            cfg.validate()
            print(f"ok: {cfg.scenario.value}")
            return EXIT_OK
        # run
        cfg = ExperimentConfig.load(args.config)
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, base_seed=args.seed)
        workers = _resolve_workers(args.workers, cfg)
        if workers < 1:
            raise ConfigError("workers must be >= 1")
        result = run_scenario(cfg, workers=workers)
        paths = emit(result, args.format, args.out)
        for p in paths:
            print(p)
        return EXIT_OK
    except ResourceGuardError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RelaxometerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
