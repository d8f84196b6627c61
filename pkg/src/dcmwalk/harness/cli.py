"""Command line entry point: run, metrics, sweep and validate scenarios.

Log verbosity follows the ``DCMWALK_LOG`` environment variable (a logging
level name, default ``WARNING``).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import yaml

from ..errors import EmptyLog, ScenarioInvalid
from .episode import SimLog, run_episode
from .metrics import compute_metrics
from .scenario import BUNDLED, load_scenario, with_override

EXIT_FALL = 2
EXIT_INVALID = 3


def _print_metrics(metrics, stream=None):
    stream = stream or sys.stdout
    json.dump(metrics.as_dict(), stream, indent=2, allow_nan=True)
    stream.write("\n")


def _cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    log = run_episode(scenario)
    if args.out:
        log.to_csv(args.out, timing=args.timing)
    _print_metrics(compute_metrics(log, scenario.sole.half_length, scenario.sole.half_width))
    if log.fall is not None:
        print(str(log.fall), file=sys.stderr)
        return EXIT_FALL
    return 0


def _cmd_metrics(args) -> int:
    _print_metrics(compute_metrics(SimLog.from_csv(args.csv)))
    return 0


def _cmd_sweep(args) -> int:
    base = load_scenario(args.scenario)
    status = 0
    print("value,fall,dcm_err_max_x,dcm_err_max_y,dcm_err_rms_x,dcm_err_rms_y")
    for text in args.values:
        value = yaml.safe_load(text)
        log = run_episode(with_override(base, args.param, value))
        m = compute_metrics(log)
        print(",".join([text, str(int(log.fall is not None)),
                        *(repr(v) for v in m.dcm_error_max + m.dcm_error_rms)]))
        if log.fall is not None:
            status = EXIT_FALL
    return status


def _cmd_validate(args) -> int:
    targets = args.scenarios or list(BUNDLED)
    status = 0
    for target in targets:
        try:
            load_scenario(target)
            print(f"{target}: ok")
        except ScenarioInvalid as exc:
            print(f"{target}: invalid: {exc}")
            status = EXIT_INVALID
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dcmwalk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a scenario")
    run.add_argument("scenario", help="scenario file or bundled name")
    run.add_argument("--out", type=Path, help="CSV log path")
    run.add_argument("--timing", action="store_true",
                     help="append wall-clock solve times (breaks byte-identical replays)")
    run.set_defaults(func=_cmd_run)

    met = sub.add_parser("metrics", help="summarize a CSV log")
    met.add_argument("csv", type=Path)
    met.set_defaults(func=_cmd_metrics)

    sweep = sub.add_parser("sweep", help="run a scenario over values of one parameter")
    sweep.add_argument("scenario")
    sweep.add_argument("--param", required=True, help="dotted key, e.g. dcm.k_p")
    sweep.add_argument("--values", nargs="+", required=True)
    sweep.set_defaults(func=_cmd_sweep)

    val = sub.add_parser("validate", help="check scenario files (default: bundled)")
    val.add_argument("scenarios", nargs="*")
    val.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("DCMWALK_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioInvalid as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (EmptyLog, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
