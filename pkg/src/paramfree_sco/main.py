"""
Parameter-Free SCO - command-line entry point
"""

from dotenv import load_dotenv
# Load environment variables from .env file before settings are read
load_dotenv()

import argparse
import asyncio
import json
import logging
import sys
from typing import Any, Dict, List, Optional

from . import __version__
from .config import APP_INFO, setup_logging
from .errors import ConfigError, InvariantViolation, ParamFreeError
from .harness.config_loader import load_config, parse_key_values
from .harness.experiments import RUNNERS, create_runner

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3
EXIT_ERROR = 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paramfree-sco", description=APP_INFO["description"])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subcommands = parser.add_subparsers(dest="command", required=True)

    for name, runner in RUNNERS.items():
        sub = subcommands.add_parser(name, help=(runner.__doc__ or "").strip().splitlines()[0])
        sub.add_argument("--config", help="key=value configuration file")
        sub.add_argument("--seed", type=int, help="master seed")
        sub.add_argument("--trials", type=int, help="number of trials")
        sub.add_argument("--out", help="per-trial CSV path; the summary goes next to it")
        sub.add_argument("--workers", type=int, help="concurrent trial tasks")
        sub.add_argument(
            "--set", dest="settings", action="append", default=[], metavar="KEY=VALUE",
            help="override any configuration key, e.g. --set n_grid=250,1000 --set family.shift=1",
        )
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = parse_key_values(args.settings, "--set")
    overrides.update(
        experiment=args.command,
        seed=args.seed,
        trials=args.trials,
        out=args.out,
        workers=args.workers,
    )
    return overrides


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the command line"""
    args = build_parser().parse_args(argv)
    setup_logging()

    try:
        config = load_config(args.config, _overrides(args))
        runner = create_runner(config)
        logger.info(f"Starting {config.experiment} (seed {config.seed}, {config.trials} trials)")
        report = asyncio.run(runner.run())
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as e:
        logger.error(f"Invariant violated: {e}")
        print(json.dumps(e.to_record(), sort_keys=True, default=str), file=sys.stderr)
        return EXIT_INVARIANT
    except ParamFreeError as e:
        logger.error(f"Run failed: {e}")
        print(json.dumps({"status": "FAILURE", "error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return EXIT_ERROR

    if config.out:
        report.write(config.out)
    else:
        sys.stdout.write(report.rows_csv())
        sys.stdout.write(report.summary_csv())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
