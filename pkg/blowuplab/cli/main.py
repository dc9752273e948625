import argparse
import logging
from pathlib import Path
from typing import Dict, List, Optional

from blowuplab.core.errors import ConfigError, ConstraintViolation, DomainError, NumericalError

from .config import parse_config
from .subcommands import run_subcommand

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_CONSTRAINT = 4


def parse_overrides(items: List[str]) -> Dict[str, str]:
    overrides = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    return overrides


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blowuplab", description="Numerical experiments on type II blow-up of u_t = Delta u + u^5"
    )
    parser.add_argument("config", type=Path, help="Configuration file of key=value lines")
    parser.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE", help="Override one key"
    )
    parser.add_argument(
        "--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Logging threshold"
    )
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)
    try:
        text = args.config.read_text(encoding="utf-8")
    except OSError as err:
        logger.error("Cannot read configuration: %s", err)
        return EXIT_CONFIG
    try:
        config = parse_config(text, parse_overrides(args.overrides))
        out = run_subcommand(config)
    except ConfigError as err:
        logger.error("%s", err)
        return EXIT_CONFIG
    except ConstraintViolation as err:
        for failure in err.failures:
            logger.error("Constraint %s (%s) fails with margin %.4g", failure.id, failure.description, failure.margin)
        logger.error("Set override=true to run anyway")
        return EXIT_CONSTRAINT
    except (NumericalError, DomainError) as err:
        logger.error("Run failed: %s", err)
        return EXIT_NUMERICAL
    logger.info("Outputs written to %s", out)
    return EXIT_OK
