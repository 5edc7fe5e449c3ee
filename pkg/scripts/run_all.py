#!/usr/bin/env python3
"""Run every bundled scenario and print a one-line outcome for each.

Outputs land in each scenario's configured output_dir (override the
destination root with SERPENT_OUTPUT_DIR per invocation if needed).
"""

import argparse
import sys
from pathlib import Path

from serpent.cli import cmd_run

SCENARIOS = ("single_waypoint", "star", "home_retreat", "disturbance")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--scenario-dir",
        type=Path,
        default=Path(__file__).resolve().parent.parent / "scenarios",
    )
    args = parser.parse_args()

    worst = 0
    for name in SCENARIOS:
        path = args.scenario_dir / f"{name}.cfg"
        code = cmd_run(path)
        print(f"{name}: exit {code}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
