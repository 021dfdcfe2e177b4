"""Command line entry point: ``l1rom {hdm,greedy,rom,verify,pod-compare}``."""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from l1rom.application.use_cases.experiments import ExperimentKind
from l1rom.cli.commands import COMMANDS
from l1rom.cli.config import load_experiment_config
from l1rom.config import get_settings
from l1rom.config.environment import load_env_file
from l1rom.domain.entities.rom import RomMethod
from l1rom.domain.errors import ConfigError, DictionaryFormatError, L1RomError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_VERIFICATION = 4

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="l1rom", description="Dictionary-based L1 residual-minimization ROMs for 1D hyperbolic problems"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, command in COMMANDS.items():
        sub = subparsers.add_parser(name, help=(command.__doc__ or "").splitlines()[0])
        sub.add_argument(
            "experiment",
            nargs="?",
            choices=[kind.value for kind in ExperimentKind],
            help="Experiment to run (overrides EXPERIMENT from the config file)",
        )
        sub.add_argument("--config", type=str, default=None, help="KEY = value experiment configuration file")
        sub.add_argument("--seed", type=int, default=None, help="Seed for rank perturbations")
        sub.add_argument("--out", type=str, default=None, help="Output directory")
        sub.add_argument(
            "--method",
            type=str,
            default=None,
            choices=[method.value for method in RomMethod] + ["all"],
            help="ROM method, or 'all' for the method table",
        )
        sub.add_argument("--mu", type=float, default=None, help="Target parameter")
        sub.add_argument("--threads", type=int, default=None, help="Worker threads for greedy candidate evaluation")
        sub.add_argument("--quiet", action="store_true", help="Only log warnings and errors")
    return parser


def configure_logging(quiet: bool = False) -> None:
    level = logging.WARNING if quiet else getattr(logging, get_settings().log_level.upper(), logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


def run(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one command and map the outcome to an exit code"""
    args = build_parser().parse_args(argv)
    load_env_file()
    configure_logging(args.quiet)

    try:
        cfg = load_experiment_config(
            args.config,
            {
                "experiment": args.experiment,
                "seed": args.seed,
                "out": args.out,
                "method": args.method,
                "mu": args.mu,
                "threads": args.threads,
            },
        )
        manifest = COMMANDS[args.command](cfg)
    except (ConfigError, ValidationError, DictionaryFormatError, OSError) as e:
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except L1RomError as e:
        logger.error("%s failed: %s", args.command, e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SOLVER

    if not manifest.passed:
        logger.error("%s reported failures: %s", args.command, manifest.summary)
        return EXIT_VERIFICATION
    return EXIT_OK


def main() -> None:
    sys.exit(run())
