"""Batch harness: sweep planning schemes over seeded scenarios, write CSV.

Output layout (column order is fixed; floats use nine significant digits):

  metrics.csv    scheme,seed,n,ratio,e_loss_total,e_fly,e_hov,e_chrg,e_rcv,
                 timespan,tour_length,position_count,direction_count
  timings.csv    scheme,seed,n,ratio,t_direction,t_lp,t_tour,t_total
  aggregates.csv scheme,n,ratio,runs + mean_*/std_* for the float metrics
  skipped.csv    scheme,seed,n,ratio,reason

Timing columns are wall clock, so they live in their own file; the other
tables depend only on (scheme, seed, n, ratio) and reproduce byte for byte.
Rows are ordered by (scheme, n, ratio, seed) regardless of config order or
worker scheduling.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import logging
import multiprocessing
import traceback
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baselines import MethodChoice
from .scenario import PRESETS, generate_scenario
from .schedule import dumps_schedule
from .scheduler import InfeasibleScheduleError, PlannerOptions, plan_schedule

logger = logging.getLogger(__name__)

METRIC_COLUMNS = (
    "scheme", "seed", "n", "ratio",
    "e_loss_total", "e_fly", "e_hov", "e_chrg", "e_rcv",
    "timespan", "tour_length", "position_count", "direction_count",
)
TIMING_COLUMNS = ("scheme", "seed", "n", "ratio",
                  "t_direction", "t_lp", "t_tour", "t_total")
AGGREGATE_METRICS = ("e_loss_total", "e_fly", "e_hov", "e_chrg", "e_rcv",
                     "timespan", "tour_length")


def format_value(value) -> str:
    """Render a cell: ints verbatim, floats with 9 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("boolean cells are not part of any table")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.9g" % float(value)
    return str(value)


@dataclass
class MetricsRow:
    """One planning run: identity, energy account, sizes, and solve times."""

    scheme: str
    seed: int
    n: int
    ratio: float
    e_loss_total: float
    e_fly: float
    e_hov: float
    e_chrg: float
    e_rcv: float
    timespan: float
    tour_length: float
    position_count: int
    direction_count: int
    t_direction: float
    t_lp: float
    t_tour: float
    t_total: float

    def key(self) -> tuple:
        return (self.scheme, self.n, self.ratio, self.seed)


@dataclass
class SkipRecord:
    scheme: str
    seed: int
    n: int
    ratio: float
    reason: str

    def key(self) -> tuple:
        return (self.scheme, self.n, self.ratio, self.seed)


@dataclass
class ExperimentConfig:
    """Sweep description: which schemes to run over which (seed, n, ratio) grid."""

    schemes: tuple[str, ...] = ("node:funceqv:lkh_style",)
    seeds: tuple[int, ...] = (0,)
    n_values: tuple[int, ...] = (50,)
    ratios: tuple[float, ...] = (1.0,)
    preset: str = "desk"
    out_dir: str | None = None
    jobs: int = 1
    save_schedules: bool = False
    planner: PlannerOptions = field(
        default_factory=lambda: PlannerOptions(lp_backend="highs"))

    def __post_init__(self):
        self.schemes = tuple(self.schemes)
        self.seeds = tuple(int(s) for s in self.seeds)
        self.n_values = tuple(int(v) for v in self.n_values)
        self.ratios = tuple(float(r) for r in self.ratios)
        if not self.schemes:
            raise ValueError("at least one scheme is required")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if not self.n_values or not self.ratios:
            raise ValueError("sweep axes must be nonempty")
        if any(v < 1 for v in self.n_values):
            raise ValueError("node counts must be positive")
        if any(r < 0 for r in self.ratios):
            raise ValueError("hover ratios must be nonnegative")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if self.preset not in PRESETS:
            raise ValueError(f"unknown preset {self.preset!r}; "
                             f"choose from {sorted(PRESETS)}")
        for label in self.schemes:
            MethodChoice.parse(label)  # fail fast on typos


def config_from_dict(d: dict) -> ExperimentConfig:
    """Build a config from parsed JSON; scalar sweep axes are promoted."""
    d = dict(d)
    seeds = d.pop("seeds", (0,))
    if isinstance(seeds, int):
        seeds = tuple(range(seeds))
    n_values = d.pop("n", d.pop("n_values", (50,)))
    if isinstance(n_values, (int, float)):
        n_values = (int(n_values),)
    ratios = d.pop("ratios", (1.0,))
    if isinstance(ratios, (int, float)):
        ratios = (float(ratios),)
    planner_kwargs = d.pop("planner", {})
    if not isinstance(planner_kwargs, dict):
        raise ValueError("'planner' must be an object of option overrides")
    planner_kwargs.setdefault("lp_backend", "highs")
    planner = PlannerOptions(**planner_kwargs)
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    extra = set(d) - known
    if extra:
        raise ValueError(f"unknown config keys: {sorted(extra)}")
    return ExperimentConfig(seeds=seeds, n_values=n_values, ratios=ratios,
                            planner=planner, **d)


@dataclass(frozen=True)
class _RunTask:
    scheme: str
    seed: int
    n: int
    ratio: float
    preset: str
    planner: PlannerOptions
    schedule_dir: str | None


@dataclass
class ExperimentResult:
    rows: list[MetricsRow]
    skipped: list[SkipRecord]
    errors: list[str]
    out_dir: Path | None = None

    @property
    def ok(self) -> bool:
        return not self.errors


def _schedule_filename(task: _RunTask) -> str:
    scheme = task.scheme.replace(":", "-")
    return f"{scheme}_n{task.n}_r{task.ratio:g}_s{task.seed}.json"


def _execute(task: _RunTask):
    """Run one (scheme, seed, n, ratio) cell; safe to call in a worker."""
    try:
        params = dataclasses.replace(PRESETS[task.preset],
                                     n=task.n, hover_ratio=task.ratio)
        scenario = generate_scenario(task.seed, params)
        methods = MethodChoice.parse(task.scheme)
        result = plan_schedule(scenario, methods, task.planner)
    except InfeasibleScheduleError as exc:
        return ("skip", task, f"infeasible nodes {exc.node_ids}")
    except Exception:
        return ("error", task, traceback.format_exc(limit=8))
    rep, st = result.report, result.stats
    row = MetricsRow(
        scheme=task.scheme, seed=task.seed, n=task.n, ratio=task.ratio,
        e_loss_total=rep.e_loss_total, e_fly=rep.e_fly, e_hov=rep.e_hov,
        e_chrg=rep.e_chrg, e_rcv=rep.e_rcv, timespan=rep.timespan,
        tour_length=st.tour_length, position_count=st.position_count,
        direction_count=st.direction_count,
        t_direction=st.t_direction, t_lp=st.t_lp, t_tour=st.t_tour,
        t_total=st.t_total)
    if task.schedule_dir is not None:
        path = Path(task.schedule_dir) / _schedule_filename(task)
        path.write_text(dumps_schedule(result.schedule))
    return ("ok", task, row)


def _write_csv(path: Path, header: tuple[str, ...], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    path.write_text(buf.getvalue())


def write_metrics_csv(path, rows: list[MetricsRow]) -> None:
    _write_csv(Path(path), METRIC_COLUMNS,
               ([getattr(r, c) for c in METRIC_COLUMNS] for r in rows))


def write_timings_csv(path, rows: list[MetricsRow]) -> None:
    _write_csv(Path(path), TIMING_COLUMNS,
               ([getattr(r, c) for c in TIMING_COLUMNS] for r in rows))


def aggregate_rows(rows: list[MetricsRow]) -> list[tuple]:
    """Group by (scheme, n, ratio); mean and population stddev per metric."""
    groups: dict[tuple, list[MetricsRow]] = {}
    for row in rows:
        groups.setdefault((row.scheme, row.n, row.ratio), []).append(row)
    out = []
    for key in sorted(groups):
        members = groups[key]
        cells = [*key, len(members)]
        for metric in AGGREGATE_METRICS:
            values = np.array([getattr(r, metric) for r in members])
            cells.append(float(values.mean()))
            cells.append(float(values.std()))
        out.append(tuple(cells))
    return out


def write_aggregates_csv(path, rows: list[MetricsRow]) -> None:
    header = ["scheme", "n", "ratio", "runs"]
    for metric in AGGREGATE_METRICS:
        header += [f"mean_{metric}", f"std_{metric}"]
    _write_csv(Path(path), tuple(header), aggregate_rows(rows))


def write_skipped_csv(path, skipped: list[SkipRecord]) -> None:
    _write_csv(Path(path), ("scheme", "seed", "n", "ratio", "reason"),
               ([s.scheme, s.seed, s.n, s.ratio, s.reason] for s in skipped))


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Execute the sweep; write CSVs when config.out_dir is set.

    Infeasible scenarios are logged and skipped; any other failure is
    recorded in .errors (callers should treat a nonempty list as a
    nonzero exit).
    """
    out_dir = Path(config.out_dir) if config.out_dir is not None else None
    schedule_dir = None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        if config.save_schedules:
            sched_path = out_dir / "schedules"
            sched_path.mkdir(exist_ok=True)
            schedule_dir = str(sched_path)

    seen: set[tuple] = set()
    tasks: list[_RunTask] = []
    for scheme in sorted(set(config.schemes)):
        for n in config.n_values:
            for ratio in config.ratios:
                for seed in config.seeds:
                    key = (scheme, n, ratio, seed)
                    if key in seen:
                        continue
                    seen.add(key)
                    tasks.append(_RunTask(
                        scheme=scheme, seed=seed, n=n, ratio=ratio,
                        preset=config.preset, planner=config.planner,
                        schedule_dir=schedule_dir))

    if config.jobs > 1 and len(tasks) > 1:
        with multiprocessing.Pool(config.jobs) as pool:
            outcomes = pool.map(_execute, tasks, chunksize=1)
    else:
        outcomes = [_execute(t) for t in tasks]

    rows: list[MetricsRow] = []
    skipped: list[SkipRecord] = []
    errors: list[str] = []
    for kind, task, payload in outcomes:
        if kind == "ok":
            rows.append(payload)
        elif kind == "skip":
            rec = SkipRecord(scheme=task.scheme, seed=task.seed, n=task.n,
                             ratio=task.ratio, reason=payload)
            skipped.append(rec)
            logger.warning("skipping %s seed=%d n=%d ratio=%g: %s",
                           task.scheme, task.seed, task.n, task.ratio, payload)
        else:
            msg = (f"run failed: {task.scheme} seed={task.seed} "
                   f"n={task.n} ratio={task.ratio}\n{payload}")
            errors.append(msg)
            logger.error("%s", msg)

    rows.sort(key=MetricsRow.key)
    skipped.sort(key=SkipRecord.key)

    if out_dir is not None:
        write_metrics_csv(out_dir / "metrics.csv", rows)
        write_timings_csv(out_dir / "timings.csv", rows)
        write_aggregates_csv(out_dir / "aggregates.csv", rows)
        write_skipped_csv(out_dir / "skipped.csv", skipped)

    return ExperimentResult(rows=rows, skipped=skipped, errors=errors,
                            out_dir=out_dir)
