"""Command line: ``bohm-lab run|list|validate``.

Exit codes: 0 all checks pass, 1 a physics check failed, 2 usage or config error.
Verbosity comes from BOHM_LAB_VERBOSITY (0 quiet, 1 summary [default], 2 per-check log).
"""

import argparse
import logging
import os
import sys

from .config import DESCRIPTIONS, SCENARIOS, build_scenario, load_config
from .errors import BohmLabError, ConfigError, UsageError

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
VERBOSITY_ENV = "BOHM_LAB_VERBOSITY"


def _verbosity():
    raw = os.environ.get(VERBOSITY_ENV, "1")
    try:
        return int(raw)
    except ValueError:
        return 1


def _parser():
    p = argparse.ArgumentParser(prog="bohm-lab", description="Bohm potential and Madelung experiments")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a named scenario")
    run.add_argument("scenario")
    run.add_argument("--config", help="TOML config file")
    run.add_argument("--out", help="output directory (default out/<scenario>)")
    run.add_argument("--seed", type=int, help="random seed override")
    sub.add_parser("list", help="list scenarios")
    val = sub.add_parser("validate", help="check a config file without running it")
    val.add_argument("config")
    return p


def _describe(err):
    if isinstance(err, ConfigError):
        where = []
        if err.field:
            where.append(f"field {err.field}")
        if err.line:
            where.append(f"line {err.line}")
        return f"config error ({', '.join(where)}): {err}" if where else f"config error: {err}"
    return f"usage error: {err}"


def _load(args):
    out = args.out or os.path.join("out", args.scenario)
    if args.config:
        sc = load_config(args.config, scenario=args.scenario, output_dir=out)
    else:
        sc = build_scenario(args.scenario, output_dir=out)
    if args.seed is not None:
        sc = build_scenario(sc.name, {**sc.config, "seed": args.seed}, out)
    return sc


def main(argv=None):
    args = _parser().parse_args(argv)
    verbosity = _verbosity()
    logging.basicConfig(level=logging.INFO if verbosity >= 2 else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    if args.command == "list":
        for name in SCENARIOS:
            print(f"{name:18s} {DESCRIPTIONS[name]}")
        return EXIT_PASS
    try:
        if args.command == "validate":
            sc = load_config(args.config)
            print(f"ok: {sc.name}")
            return EXIT_PASS
        sc = _load(args)
    except (UsageError, ConfigError) as err:
        print(_describe(err), file=sys.stderr)
        return EXIT_USAGE

    from .scenarios import run_scenario

    try:
        outcome = run_scenario(sc)
    except BohmLabError as err:
        print(f"{sc.name}: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_USAGE if isinstance(err, (UsageError, ConfigError)) else EXIT_FAIL
    failing = [c for c in outcome.checks if not c.passed]
    if verbosity >= 1:
        status = "PASS" if not failing else "FAIL"
        print(f"{sc.name}: {status} ({len(outcome.checks) - len(failing)}/{len(outcome.checks)} checks)"
              f" -> {sc.output_dir}")
    for c in failing:
        print(f"failed check: {c.line()}", file=sys.stderr)
    return EXIT_FAIL if failing else EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
