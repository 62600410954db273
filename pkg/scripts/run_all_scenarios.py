"""Run every built-in scenario with its defaults and print a one-line verdict each.

    python scripts/run_all_scenarios.py [--out out/all]
"""

import argparse
import sys
from pathlib import Path

from bohm_lab.config import SCENARIOS, build_scenario
from bohm_lab.scenarios import run_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="out/all")
    args = ap.parse_args()
    failed = []
    for name in SCENARIOS:
        outcome = run_scenario(build_scenario(name, output_dir=str(Path(args.out) / name)))
        ok = all(c.passed for c in outcome.checks)
        print(f"{name:18s} {'PASS' if ok else 'FAIL'}  ({sum(c.passed for c in outcome.checks)}/{len(outcome.checks)})")
        if not ok:
            failed.append(name)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
