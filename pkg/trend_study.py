#!/usr/bin/env python3
"""
Unexpected-outlier trend studies from the command line.

    python trend_study.py digits --runs 100
    python trend_study.py solvent --runs 50 --workers 4
    python trend_study.py run --primary p.arff --secondary s.arff --increments 0 10 20

Each study writes <stem>_error.csv, <stem>_ber.csv and <stem>_manifest.json
into the output directory.
"""

import argparse
import logging
import sys
from pathlib import Path

import httpx

from app.core.config import settings
from app.core.logging import configure_logging
from app.shared.exceptions import OscailError
from app.modules.harness.datasets import prepare_digit_study, prepare_solvent_study
from app.modules.harness.schemas import RosterEntry, TrendStudyConfig
from app.modules.harness.service import DIGIT_ROSTER, SOLVENT_ROSTER, TrendStudyService, render_trend_table

logger = logging.getLogger("trend_study")


def _roster(names):
    return [RosterEntry(algorithm=name) for name in names]


def main() -> int:
    parser = argparse.ArgumentParser(description="Unexpected-outlier trend studies")
    parser.add_argument("study", choices=["digits", "solvent", "run"])
    parser.add_argument("--primary", help="primary ARFF set (study 'run')")
    parser.add_argument("--secondary", help="secondary ARFF set (study 'run')")
    parser.add_argument("--algorithms", nargs="+", default=["KNN", "BKNN"],
                        help="registry ids with default options (study 'run')")
    parser.add_argument("--increments", nargs="+", type=int)
    parser.add_argument("--runs", type=int, default=100)
    parser.add_argument("--seed", type=int, default=2)
    parser.add_argument("--train-percent", type=float, default=67.0)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--data-dir", default=settings.DATA_DIR)
    parser.add_argument("--output-dir", default=settings.DATA_DIR)
    args = parser.parse_args()

    configure_logging()
    try:
        if args.study == "digits":
            primary, secondary = prepare_digit_study(args.data_dir)
            roster, increments = DIGIT_ROSTER, list(range(0, 201, 25))
        elif args.study == "solvent":
            primary, secondary = prepare_solvent_study(args.data_dir, args.seed)
            roster, increments = SOLVENT_ROSTER, list(range(0, 51, 10))
        else:
            if not args.primary or not args.secondary:
                parser.error("study 'run' needs --primary and --secondary")
            primary, secondary = Path(args.primary), Path(args.secondary)
            roster, increments = _roster(args.algorithms), [0]

        config = TrendStudyConfig(
            primary_path=str(primary),
            secondary_path=str(secondary),
            increments=args.increments or increments,
            runs=args.runs,
            seed=args.seed,
            train_percent=args.train_percent,
            roster=roster,
            workers=args.workers,
        )
        table = TrendStudyService().run(config, args.output_dir, stem=args.study)
    except (OscailError, OSError, httpx.HTTPError) as exc:
        logger.error(f"Trend study failed: {exc}")
        return 1

    print("Error (%)")
    print(render_trend_table(table, "error"))
    print("")
    print("BER (%)")
    print(render_trend_table(table, "ber"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
