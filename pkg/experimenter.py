#!/usr/bin/env python3
"""
OSCAIL experimenter.

    python experimenter.py -E iris.arff -R yes -T ms -S cv -r 3
    python experimenter.py --answers answers.txt -E iris.arff

With no switches the option usage is shown and a saved classifier can be
loaded and tested.
"""

import argparse
import sys

from app.core.logging import configure_logging
from app.modules.cli.service import Prompter, run_cli


def main() -> int:
    parser = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    parser.add_argument("--answers", help="file with one prompt answer per line")
    parser.add_argument("--log-level", help="logging level (default: LOG_LEVEL setting)")
    known, switches = parser.parse_known_args()

    configure_logging(known.log_level)
    prompter = Prompter.from_file(known.answers) if known.answers else None
    return run_cli(switches, prompter)


if __name__ == "__main__":
    sys.exit(main())
