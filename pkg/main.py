#!/usr/bin/env python3
"""
Command-line entry point: estimate the leakage of one program.

    python main.py program.hyleak --mode hybrid --samples 50000 --json out.json
"""

import argparse
import logging
import sys
from dataclasses import replace
from typing import Dict, List, Optional, Sequence

from config import LOG_DIR, LOG_LEVEL, VALID_MODES, validate_config
from exceptions import FrontendError, LeakageAnalysisError
from logging_config import setup_logging
from services.analysis_service import AnalysisService, OutputPaths
from services.run_report import format_text_report

logger = logging.getLogger(__name__)


def parse_constants(pairs: Sequence[str]) -> Dict[str, int]:
    """Turn ``NAME=VALUE`` strings into a constant table."""
    constants: Dict[str, int] = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or not name.strip():
            raise argparse.ArgumentTypeError(f"--const expects NAME=VALUE (got '{pair}')")
        try:
            constants[name.strip()] = int(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"--const {name}: '{value}' is not an integer")
    return constants


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Estimate the information leakage of a probabilistic program"
    )
    parser.add_argument("file", help="Program source (.hyleak)")
    parser.add_argument("--mode", choices=VALID_MODES, help="Analysis mode (default: hybrid)")
    parser.add_argument("--samples", type=int, help="Total sample budget across components")
    parser.add_argument("--seed", type=int, help="Random seed")
    parser.add_argument("--alpha", type=float, help="Confidence level is 1 - alpha")
    parser.add_argument("--realloc", type=float, help="Fraction of the budget per sampling batch")
    parser.add_argument("--matrix", action="store_true",
                        help="Write the joint matrix CSV into the output directory")
    parser.add_argument("--cfg-dot", metavar="PATH", help="Write the annotated CFG as DOT")
    parser.add_argument("--json", metavar="PATH", help="Write the JSON report")
    parser.add_argument("--pp-dir", metavar="DIR", help="Write preprocessed programs (.pp)")
    parser.add_argument("--trace-csv", metavar="PATH", help="Write exact trace outcomes")
    parser.add_argument("--const", action="append", default=[], metavar="NAME=VALUE",
                        help="Bind a const declared without a value (repeatable)")
    parser.add_argument("--timeout", type=float, help="Wall-clock cap in seconds")
    parser.add_argument("--workers", type=int, help="Concurrent sampling workers")
    parser.add_argument("--output-dir", help="Directory for default artifact locations")
    parser.add_argument("--log-level", default=LOG_LEVEL, help=f"Logging level (default: {LOG_LEVEL})")
    parser.add_argument("--log-dir", default=LOG_DIR, help=f"Log directory (default: {LOG_DIR})")
    parser.add_argument("--plain-estimator", action="store_true",
                        help="Use the general estimator even when the prior is known")
    parser.add_argument("--corollary", action="store_true",
                        help="Also report the simplified bias correction")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    setup_logging(log_level=args.log_level, log_dir=args.log_dir)

    try:
        constants = parse_constants(args.const)
    except argparse.ArgumentTypeError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    try:
        config = validate_config(
            mode=args.mode,
            total_samples=args.samples,
            seed=args.seed,
            alpha=args.alpha,
            realloc_fraction=args.realloc,
            timeout_seconds=args.timeout,
            workers=args.workers,
            output_dir=args.output_dir,
            constants=constants or None,
            plain_estimator=args.plain_estimator or None,
            corollary=args.corollary or None,
            emit_matrix=args.matrix or None,
        )
        outputs = replace(
            OutputPaths.from_config(config, args.file),
            cfg_dot=args.cfg_dot,
            json=args.json,
            pp_dir=args.pp_dir,
            trace_csv=args.trace_csv,
        )

        service = AnalysisService(config)
        run = service.run(args.file)
        service.write_outputs(run, outputs)
    except FrontendError as e:
        # already "file:line:col: message"
        print(e.message, file=sys.stderr)
        return 1
    except LeakageAnalysisError as e:
        logger.error(f"Analysis failed: {e}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        logger.error(f"Cannot read {args.file}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1

    sys.stdout.write(format_text_report(run.report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
