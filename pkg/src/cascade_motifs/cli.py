"""Command-line entry point: ``cascade-motifs <command> [options]``.

Exit codes: 0 success, 1 analysis failures beyond tolerance or an evaluation
error, 2 configuration or input problems.
"""
from __future__ import annotations

import argparse
import logging
import sys

from .config import load_config
from .errors import ConfigError, EvaluationError, ParseError, DataError
from .pipeline import (InputError, cmd_analyze, cmd_calibrate, cmd_ingest, cmd_predict, cmd_synth,
                       render_report)

COMMANDS = ("ingest", "synth", "analyze", "predict", "calibrate", "report")

# shortcut flags and the config keys they set
SHORTCUTS = {
    "mu": "lifecycle.mu", "alpha": "lifecycle.alpha", "beta": "lifecycle.beta",
    "weighting": "lifecycle.weighting", "dtg": "lifecycle.dtg", "g": "lifecycle.g",
    "labels": "lifecycle.labels", "penalty": "prediction.penalty", "W": "windows.W",
    "cascades": "data.cascades", "diffusion": "data.diffusion", "ratings": "data.ratings",
    "ensemble_size": "significance.ensemble_size", "n_cascades": "synth.n_cascades",
    "planted_pattern": "synth.planted_pattern",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cascade-motifs", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="sectioned key=value config file")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--threads", type=int)
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override any config key (repeatable)")
    for flag, key in SHORTCUTS.items():
        parser.add_argument(f"--{flag.replace('_', '-')}", dest=flag, help=f"same as --set {key}=...")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = list(args.set)
    for flag, key in SHORTCUTS.items():
        value = getattr(args, flag)
        if value is not None:
            overrides.append(f"{key}={value}")
    for flag, key in (("seed", "run.seed"), ("threads", "run.threads"), ("out", "run.out")):
        value = getattr(args, flag)
        if value is not None:
            overrides.append(f"{key}={value}")
    try:
        cfg = load_config(args.config, overrides).validate()
        if args.command == "synth":
            cmd_synth(cfg)
        elif args.command == "ingest":
            cmd_ingest(cfg)
        elif args.command == "calibrate":
            cmd_calibrate(cfg)
        elif args.command == "analyze":
            _, code = cmd_analyze(cfg)
            return code
        elif args.command == "predict":
            cmd_predict(cfg)
        else:
            render_report(cfg)
    except (ConfigError, InputError, ParseError, DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EvaluationError as exc:
        print(f"evaluation error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
