"""End-to-end planning: positions -> beams -> charge times -> tour -> schedule.

``plan_schedule`` runs the full pipeline for one scenario and method choice:
generate candidate charging positions, synthesize or enumerate beam
directions with exact covered sets, solve the charging-time program, prune
positions that received no hover time, order the survivors into a closed
tour, and emit the executable fly/charge item list. The returned report is
the independent accounting replay of the emitted schedule, so objective
drift between the optimizer and the bookkeeping cannot hide.

``validate_schedule`` replays any schedule (including hand-edited ones) and
reports demand satisfaction, UAV energy margin, and structural soundness
without raising.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .baselines import (AcoParams, MethodChoice, generate_directions_baseline,
                        generate_positions, tour_baseline)
from .chargetime import DEMAND_EPS, solve_charge_times
from .energy import EnergyReport, account_schedule, build_transfer_matrix
from .schedule import CHARGE, FLY, Schedule, ScheduleItem

PRUNE_EPS = 1e-9


class InfeasibleScheduleError(ValueError):
    """Raised when some node's demand can never be met; carries the ids."""

    def __init__(self, node_ids, message: str | None = None):
        self.node_ids = [int(i) for i in node_ids]
        super().__init__(message or
                         f"demands cannot be met for nodes {self.node_ids}")


@dataclass(frozen=True)
class PlannerOptions:
    """Knobs shared by every pipeline stage.

    ``prune_eps`` is the hover-time threshold below which a position is
    dropped from the tour; ``lp_backend`` picks the charging-time solver.
    """

    refine_steps: int = 64
    lp_backend: str = "simplex"
    tour_move_budget: int | None = None
    aco: AcoParams = AcoParams()
    prune_eps: float = PRUNE_EPS
    grid_spacing: float | None = None
    polyhedron_kind: str = "icosahedron"


@dataclass
class PlanStats:
    """Sizes and wall-clock timings of one pipeline run. The counts are
    deterministic; the timings are environment noise and kept separate from
    any reproducibility comparison."""

    position_count: int = 0
    direction_count: int = 0
    active_position_count: int = 0
    active_direction_count: int = 0
    tour_length: float = 0.0
    t_direction: float = 0.0
    t_lp: float = 0.0
    t_tour: float = 0.0
    t_total: float = 0.0


@dataclass
class PlanResult:
    schedule: Schedule
    report: EnergyReport
    stats: PlanStats


def plan_schedule(scenario, methods: MethodChoice = MethodChoice(),
                  options: PlannerOptions = PlannerOptions()) -> PlanResult:
    """Plan one charging mission; raises InfeasibleScheduleError when some
    demand is impossible under the scenario's coverage and capacities."""
    t_start = time.perf_counter()
    nodes = np.asarray(scenario.positions, dtype=float)
    base = np.asarray(scenario.base, dtype=float)
    wpt = scenario.wpt
    uav = scenario.uav
    e_b = np.asarray(scenario.e_b, dtype=float)
    e_u = np.asarray(scenario.e_u, dtype=float)
    e_d = np.asarray(scenario.e_d, dtype=float)

    if not np.any(e_d > DEMAND_EPS):
        # nothing to deliver: the empty schedule is optimal and loses nothing
        schedule = Schedule(items=[], tour=[])
        report = account_schedule(schedule, scenario)
        stats = PlanStats(t_total=time.perf_counter() - t_start)
        return PlanResult(schedule=schedule, report=report, stats=stats)

    positions = generate_positions(nodes, methods.position_method, wpt.range,
                                   grid_spacing=options.grid_spacing)
    pairs = generate_directions_baseline(
        positions, nodes, methods.direction_method, scenario.half_angle,
        wpt.range, polyhedron_kind=options.polyhedron_kind,
        refine_steps=options.refine_steps)
    t_direction = time.perf_counter()

    c_matrix = build_transfer_matrix(pairs, nodes, wpt)
    sol = solve_charge_times(c_matrix, e_b, e_u, e_d, uav.p0, uav.hover_power,
                             backend=options.lp_backend)
    if sol.status == "infeasible":
        raise InfeasibleScheduleError(sol.infeasible_nodes)
    t_lp = time.perf_counter()

    active = np.where(sol.t > options.prune_eps)[0]
    active_pos_ids = sorted({pairs[k].position_index for k in active})
    pos_subset = positions[active_pos_ids] if active_pos_ids else np.zeros((0, 3))
    seed = 0 if getattr(scenario, "seed", None) is None else int(scenario.seed)
    tour = tour_baseline(pos_subset, base, methods.tour_method,
                         aco_params=options.aco, seed=seed)

    by_position: dict[int, list[int]] = {}
    for k in active:
        by_position.setdefault(pairs[k].position_index, []).append(int(k))

    items: list[ScheduleItem] = []
    visit_ids: list[int] = []
    cur = base
    v_bar = uav.v_bar
    for local in tour.order:
        pid = active_pos_ids[local]
        pos = positions[pid]
        items.append(ScheduleItem(state=FLY,
                                  t=float(np.linalg.norm(pos - cur)) / v_bar,
                                  x=pos.copy()))
        cur = pos
        beams = by_position[pid]
        beams.sort(key=lambda k: (-sol.t[k], tuple(pairs[k].direction)))
        for k in beams:
            items.append(ScheduleItem(state=CHARGE, t=float(sol.t[k]),
                                      v=pairs[k].direction.copy()))
        visit_ids.append(int(pid))
    if items:
        items.append(ScheduleItem(state=FLY,
                                  t=float(np.linalg.norm(base - cur)) / v_bar,
                                  x=base.copy()))

    schedule = Schedule(items=items, tour=visit_ids)
    report = account_schedule(schedule, scenario)
    t_end = time.perf_counter()

    stats = PlanStats(
        position_count=int(positions.shape[0]),
        direction_count=len(pairs),
        active_position_count=len(active_pos_ids),
        active_direction_count=int(active.size),
        tour_length=float(tour.length),
        t_direction=t_direction - t_start,
        t_lp=t_lp - t_direction,
        t_tour=t_end - t_lp,
        t_total=t_end - t_start,
    )
    return PlanResult(schedule=schedule, report=report, stats=stats)


@dataclass
class ValidationReport:
    """Replay verdict for a schedule: structural errors make it invalid,
    warnings (wasteful but executable steps) do not."""

    ok: bool
    unmet_nodes: list[int] = field(default_factory=list)
    e_f0: float = 0.0
    uav_energy_infeasible: bool = False
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def validate_schedule(schedule: Schedule, scenario) -> ValidationReport:
    """Check a schedule against a scenario without raising.

    Flags unmet demands, a drained UAV battery, malformed items, a tour that
    does not return to base, and wasteful structure (flying somewhere and
    not charging, zero-duration charges).
    """
    errors: list[str] = []
    warnings: list[str] = []
    base = np.asarray(scenario.base, dtype=float)

    charges_since_fly = 0
    fly_count = 0
    last_target = None
    for idx, item in enumerate(schedule.items):
        if not np.isfinite(item.t) or item.t < 0:
            errors.append(f"item {idx}: bad duration {item.t!r}")
        if item.state == FLY:
            if item.x is None or np.asarray(item.x).shape != (3,) \
                    or not np.all(np.isfinite(np.asarray(item.x, dtype=float))):
                errors.append(f"item {idx}: fly item without a valid target")
            else:
                if fly_count > 0 and charges_since_fly == 0:
                    warnings.append(
                        f"item {idx}: previous fly leg charged nothing")
                last_target = np.asarray(item.x, dtype=float)
            fly_count += 1
            charges_since_fly = 0
        elif item.state == CHARGE:
            if item.v is None or np.asarray(item.v).shape != (3,):
                errors.append(f"item {idx}: charge item without a direction")
            elif abs(float(np.linalg.norm(np.asarray(item.v, float))) - 1.0) > 1e-6:
                errors.append(f"item {idx}: direction is not unit length")
            if item.t <= 0:
                warnings.append(f"item {idx}: zero-duration charge")
            charges_since_fly += 1
        else:
            errors.append(f"item {idx}: unknown state {item.state!r}")

    # a charge-only schedule executes at the base, which trivially "returns"
    if last_target is not None and np.linalg.norm(last_target - base) > 1e-9:
        errors.append("schedule does not return to base")

    structural_ok = not errors
    unmet: list[int] = []
    e_f0 = float(scenario.uav.e_b0)
    uav_bad = False
    if structural_ok:
        report = account_schedule(schedule, scenario)
        e_b = np.asarray(scenario.e_b, dtype=float)
        e_d = np.asarray(scenario.e_d, dtype=float)
        gained = report.e_f - e_b
        unmet = [int(i) for i in np.where(gained < e_d - 1e-6)[0]]
        e_f0 = float(report.e_f0)
        uav_bad = bool(report.uav_energy_infeasible)

    ok = structural_ok and not unmet and not uav_bad
    return ValidationReport(ok=ok, unmet_nodes=unmet, e_f0=e_f0,
                            uav_energy_infeasible=uav_bad, errors=errors,
                            warnings=warnings)
