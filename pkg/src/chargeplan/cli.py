"""Command line front end.

Three subcommands:

  plan        plan one scenario and emit the schedule as JSON
  experiment  run a sweep described by a JSON config and write CSV tables
  oracle      replay a saved schedule against its scenario with the
              independent validators and report pass/fail

`plan` reads a scenario JSON via --config, or draws one with --seed and
--preset. Without --out the schedule JSON goes to stdout; with --out it is
written to <out>/schedule.json alongside report.json.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .baselines import MethodChoice
from .energy import account_schedule
from .experiment import config_from_dict, run_experiment
from .scenario import PRESETS, generate_scenario, load_scenario
from .schedule import FLY, dumps_schedule, load_schedule
from .scheduler import PlannerOptions, plan_schedule, validate_schedule
from .tour import brute_force_tour


def _scenario_from_args(args) -> "object":
    if args.config is not None:
        return load_scenario(args.config)
    return generate_scenario(args.seed, PRESETS[args.preset])


def _add_scenario_flags(sub) -> None:
    sub.add_argument("--config", type=Path, default=None,
                     help="scenario JSON file (overrides --seed/--preset)")
    sub.add_argument("--seed", type=int, default=0,
                     help="seed for a randomly drawn scenario (default 0)")
    sub.add_argument("--preset", choices=sorted(PRESETS), default="desk",
                     help="parameter preset for drawn scenarios")


def cmd_plan(args) -> int:
    scenario = _scenario_from_args(args)
    methods = MethodChoice.parse(args.scheme)
    result = plan_schedule(scenario, methods,
                           PlannerOptions(lp_backend="highs"))
    check = validate_schedule(result.schedule, scenario)
    text = dumps_schedule(result.schedule, result.report)
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "schedule.json").write_text(text + "\n")
        (out / "report.json").write_text(
            json.dumps(result.report.as_dict(), sort_keys=True, indent=1) + "\n")
        print(f"schedule written to {out / 'schedule.json'}", file=sys.stderr)
    else:
        print(text)
    print(f"e_loss_total={result.report.e_loss_total:.9g} "
          f"timespan={result.report.timespan:.9g} "
          f"positions={result.stats.active_position_count} "
          f"directions={result.stats.active_direction_count}",
          file=sys.stderr)
    if not check.ok:
        print(f"validation failed: errors={check.errors} "
              f"unmet={check.unmet_nodes}", file=sys.stderr)
        return 2
    return 0


def cmd_experiment(args) -> int:
    raw = json.loads(Path(args.config).read_text())
    config = config_from_dict(raw)
    if args.out is not None:
        config.out_dir = str(args.out)
    if args.jobs is not None:
        config.jobs = int(args.jobs)
    if config.out_dir is None:
        print("no output directory: pass --out or set out_dir in the config",
              file=sys.stderr)
        return 2
    result = run_experiment(config)
    print(f"{len(result.rows)} runs ok, {len(result.skipped)} skipped, "
          f"{len(result.errors)} failed -> {config.out_dir}", file=sys.stderr)
    for err in result.errors:
        print(err, file=sys.stderr)
    return 0 if result.ok else 1


def cmd_oracle(args) -> int:
    scenario = _scenario_from_args(args)
    schedule = load_schedule(args.schedule)
    failures = 0

    check = validate_schedule(schedule, scenario)
    print(f"[{'PASS' if check.ok else 'FAIL'}] schedule validity "
          f"(errors={len(check.errors)}, unmet={check.unmet_nodes})")
    failures += 0 if check.ok else 1
    for msg in check.errors:
        print(f"    error: {msg}")
    for msg in check.warnings:
        print(f"    warning: {msg}")

    report = account_schedule(schedule, scenario)
    two_way = report.e_fly + report.e_hov + report.e_chrg - report.e_rcv
    gap = abs(two_way - report.e_loss_total)
    tol = 1e-6 * max(1.0, abs(report.e_loss_total))
    ok = gap <= tol
    print(f"[{'PASS' if ok else 'FAIL'}] loss account two-way agreement "
          f"(gap={gap:.3g})")
    failures += 0 if ok else 1

    visited = [np.asarray(it.x, dtype=float) for it in schedule.items
               if it.state == FLY and it.x is not None]
    stops = [x for x in visited
             if np.linalg.norm(x - scenario.base) > 1e-9]
    uniq: list[np.ndarray] = []
    for x in stops:
        if not any(np.allclose(x, u) for u in uniq):
            uniq.append(x)
    if 0 < len(uniq) <= 9:
        best = brute_force_tour(np.array(uniq), scenario.base)
        length = 0.0
        here = scenario.base
        for x in visited:
            length += float(np.linalg.norm(x - here))
            here = x
        length += float(np.linalg.norm(scenario.base - here))
        ok = length >= best.length - 1e-9
        print(f"[{'PASS' if ok else 'FAIL'}] flight length vs exact tour "
              f"({length:.6g} >= {best.length:.6g})")
        failures += 0 if ok else 1
    else:
        print(f"[SKIP] exact tour check ({len(uniq)} stops)")

    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chargeplan",
        description="plan drone charging tours and run scheme sweeps")
    subs = parser.add_subparsers(dest="command", required=True)

    p_plan = subs.add_parser("plan", help="plan one scenario")
    _add_scenario_flags(p_plan)
    p_plan.add_argument("--scheme", default="node:funceqv:lkh_style",
                        help="position:direction:tour method triple")
    p_plan.add_argument("--out", type=Path, default=None,
                        help="directory for schedule.json and report.json")
    p_plan.set_defaults(func=cmd_plan)

    p_exp = subs.add_parser("experiment", help="run a sweep from a config")
    p_exp.add_argument("--config", type=Path, required=True,
                       help="experiment config JSON")
    p_exp.add_argument("--out", type=Path, default=None,
                       help="output directory (overrides config out_dir)")
    p_exp.add_argument("--jobs", type=int, default=None,
                       help="worker processes (overrides config jobs)")
    p_exp.set_defaults(func=cmd_experiment)

    p_orc = subs.add_parser(
        "oracle", help="check a saved schedule with the slow validators")
    p_orc.add_argument("schedule", type=Path, help="schedule JSON to check")
    _add_scenario_flags(p_orc)
    p_orc.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
