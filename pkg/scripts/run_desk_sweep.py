#!/usr/bin/env python3
"""Compare planning schemes on the desk preset and print mean losses.

Runs every requested scheme over a seeded scenario grid (sizes x hover
ratios x seeds), writes the usual CSV set into --out, and prints a small
mean/std table of e_loss_total per (scheme, n, ratio) cell so the trend is
visible without opening the files.

Typical calls:

    python3 scripts/run_desk_sweep.py --out results/desk --jobs 8
    python3 scripts/run_desk_sweep.py --sizes 50 --ratios 0.1 0.5 1.0 \
        --runs 10 --out results/ratio_sweep
"""
from __future__ import annotations

import argparse
import os
import sys
import time

from chargeplan.experiment import (AGGREGATE_METRICS, ExperimentConfig,
                                   aggregate_rows, run_experiment)
from chargeplan.scheduler import PlannerOptions

DEFAULT_SCHEMES = (
    "node:funceqv:lkh_style",
    "node:gcc:lkh_style",
    "grid:funceqv:lkh_style",
    "grid:acc:greedy",
    "cluster:funceqv:lkh_style",
    "group:funceqv:lkh_style",
    "group:polyhedron:aco",
)


def parse_args(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--schemes", nargs="+", default=list(DEFAULT_SCHEMES),
                    help="position:direction:tour method triples")
    ap.add_argument("--sizes", nargs="+", type=int, default=[50, 100, 150],
                    help="network sizes n to sweep")
    ap.add_argument("--ratios", nargs="+", type=float, default=[1.0],
                    help="hover-to-flight power ratios to sweep")
    ap.add_argument("--runs", type=int, default=50,
                    help="number of seeds (0..runs-1) per cell")
    ap.add_argument("--preset", default="desk", help="scenario preset name")
    ap.add_argument("--out", default="results/desk_sweep",
                    help="directory for metrics/timings/aggregates CSVs")
    ap.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--fan", default="soccer",
                    choices=("icosahedron", "soccer"),
                    help="fixed beam fan for the polyhedron baseline; the "
                         "32-beam fan covers the full cone reach, the "
                         "20-beam one can leave gap nodes (skipped runs)")
    ap.add_argument("--save-schedules", action="store_true",
                    help="also dump one schedule JSON per run")
    return ap.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    config = ExperimentConfig(
        schemes=tuple(args.schemes),
        seeds=tuple(range(args.runs)),
        n_values=tuple(args.sizes),
        ratios=tuple(args.ratios),
        preset=args.preset,
        out_dir=args.out,
        jobs=args.jobs,
        save_schedules=args.save_schedules,
        planner=PlannerOptions(lp_backend="highs",
                               polyhedron_kind=args.fan),
    )
    t0 = time.perf_counter()
    result = run_experiment(config)
    elapsed = time.perf_counter() - t0

    print(f"\n{len(result.rows)} runs ok, {len(result.skipped)} skipped, "
          f"{len(result.errors)} failed in {elapsed:.1f}s -> {args.out}")
    loss_at = AGGREGATE_METRICS.index("e_loss_total")
    print(f"\n{'scheme':<28} {'n':>4} {'ratio':>6} {'runs':>5} "
          f"{'mean e_loss (J)':>16} {'std':>12}")
    for cells in aggregate_rows(result.rows):
        scheme, n, ratio, runs = cells[:4]
        mean = cells[4 + 2 * loss_at]
        std = cells[5 + 2 * loss_at]
        print(f"{scheme:<28} {n:>4} {ratio:>6g} {runs:>5} "
              f"{mean:>16.6g} {std:>12.4g}")
    for err in result.errors:
        print(f"\n--- failed run ---\n{err}", file=sys.stderr)
    return 0 if result.ok else 1


if __name__ == "__main__":
    sys.exit(main())
