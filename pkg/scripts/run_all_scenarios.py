"""Run every built-in scenario and collect verdicts under one directory.

Each scenario gets its own subdirectory with verdict.json plus the
trajectory and occupation CSVs the scenario command always writes.
Exit status is the worst scenario exit status, so a failing check
(exit 5) or an exploding run (exit 4) fails the batch.
"""

import argparse
import os

from wolbachia import builtin_scenarios
from wolbachia.cli import main as wolbachia_main


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="runs",
                        help="directory that receives one subdirectory per scenario")
    parser.add_argument("--seed", type=int, default=0,
                        help="master seed shared by all scenarios")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker processes per scenario (verdicts do not depend on this)")
    args = parser.parse_args(argv)

    worst = 0
    for scenario in builtin_scenarios():
        print(f"== {scenario.name}: {scenario.description}")
        code = wolbachia_main([
            "scenario", scenario.name,
            "--out", os.path.join(args.out, scenario.name),
            "--seed", str(args.seed),
            "--jobs", str(args.jobs),
        ])
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    raise SystemExit(main())
