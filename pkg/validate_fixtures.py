#!/usr/bin/env python3
"""
Run the fixture corpus against its oracle values.

    python validate_fixtures.py                 # fast cases
    python validate_fixtures.py --slow          # everything
    python validate_fixtures.py --case dining3-precise
"""

import argparse
import logging
import sys
from typing import List, Optional

from config import LOG_DIR, validate_config
from exceptions import LeakageAnalysisError
from logging_config import setup_logging
from services.validation_service import DEFAULT_SUITE, ValidationService

logger = logging.getLogger(__name__)


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Validate leakage estimates against oracles")
    parser.add_argument("--suite", default=DEFAULT_SUITE, help=f"Oracle file (default: {DEFAULT_SUITE})")
    parser.add_argument("--slow", action="store_true", help="Include cases marked slow")
    parser.add_argument("--case", action="append", dest="cases", metavar="NAME",
                        help="Run only this case (repeatable)")
    parser.add_argument("--seed", type=int, help="Random seed")
    parser.add_argument("--log-level", default="WARNING", help="Logging level (default: WARNING)")
    args = parser.parse_args(argv)

    setup_logging(log_level=args.log_level, log_dir=LOG_DIR)

    try:
        config = validate_config(seed=args.seed)
        summary = ValidationService(config, args.suite).validate(
            include_slow=args.slow, names=args.cases
        )
    except LeakageAnalysisError as e:
        logger.error(f"Validation aborted: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1

    sys.stdout.write(summary.format_text())
    return 0 if summary.passed else 1


if __name__ == "__main__":
    sys.exit(main())
