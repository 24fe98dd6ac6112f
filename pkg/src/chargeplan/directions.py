"""Synthesis of minimal charging-direction sets per charging position.

At a fixed charging position the covered node set varies with the beam
direction over the whole sphere of directions, but only finitely many
locally-maximal covered sets exist. For each reference node A (projected
onto the unit sphere around the position) the beams keeping A exactly on
the cone boundary form a one-parameter family indexed by a plane angle; the
coverage of every other nearby node B is then an angular interval of that
parameter. Sweeping the sorted interval endpoints yields the ranges whose
midpoints attain the locally-maximal covered sets; each range is collapsed
to a single representative direction and refined by a short line search that
re-centres the beam on its covered nodes. A final pass removes directions
whose covered set is a duplicate of or strictly contained in another's at
the same position.

Nodes closer than ``APEX_EPS`` to the position itself ("apex nodes", always
present when charging positions are placed on the nodes) have no defined
direction from the position: they are treated as covered by every beam from
that position, never serve as reference or interval nodes, and a position
whose reach holds only apex nodes emits a single fallback beam along +z.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .geometry import (
    ANGLE_TOL,
    TWO_PI,
    GeometryError,
    angle_to_direction,
    boundary_directions,
    projected_angle,
    wrap_angle,
)

# nodes within this distance of a charging position count as apex nodes
APEX_EPS = 1e-9

# two projected nodes closer than this in angle share every beam
SAME_RAY_EPS = 1e-9

# slack when testing whether a node pair fits a single cone
PAIR_SPAN_TOL = 1e-10

_Z = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class AngleEndpoint:
    """One endpoint of a node's coverage interval on the sweep circle.

    theta: plane angle in [0, 2*pi); delta: 0 opens the interval, 1 closes
    it; eta: node id owning the interval; sigma: wrapped interval length;
    tau: the originating (start, end) pair.
    """

    theta: float
    delta: int
    eta: int
    sigma: float
    tau: tuple[float, float]


@dataclass(frozen=True)
class MaximalRange:
    """Angular range whose interior attains a locally-maximal covered set."""

    start: AngleEndpoint
    end: AngleEndpoint
    covered: frozenset[int]


@dataclass(eq=False)
class PosDirPair:
    """A charging position together with one beam direction and its coverage."""

    position: np.ndarray
    direction: np.ndarray
    covered: frozenset[int]
    position_index: int


@dataclass(frozen=True)
class AngleInterval:
    """Wrapped closed interval [start, end] on the circle; whole marks 2*pi."""

    start: float
    end: float
    whole: bool = False

    def span(self) -> float:
        if self.whole:
            return TWO_PI
        return (self.end - self.start) % TWO_PI


def coverage_angle_range(origin, a, b, half_angle: float) -> AngleInterval | None:
    """Plane-angle interval over which the boundary cone through A covers B.

    Parameters are the cone apex, the reference point A (pinned to the cone
    boundary), the probe point B and the cone half-angle. Returns the whole
    circle when B projects onto A's ray, ``None`` when the pair cannot share
    a cone, a zero-width interval at the unique tangent angle when the
    separation equals twice the half-angle, and otherwise the wrapped arc
    between the two plane angles whose cones also cover B.
    """
    o = np.asarray(origin, dtype=float)
    av = np.asarray(a, dtype=float)
    e_oa = av - o
    la = float(np.linalg.norm(e_oa))
    if la < 1e-15:
        raise GeometryError("reference point coincides with the origin")
    e_oa = e_oa / la
    ob = np.asarray(b, dtype=float) - o
    lb = float(np.linalg.norm(ob))
    if lb < 1e-15:
        raise GeometryError("probe point coincides with the origin")
    e_ob = ob / lb
    phi = math.atan2(float(np.linalg.norm(np.cross(e_oa, e_ob))),
                     float(np.dot(e_oa, e_ob)))
    if phi < SAME_RAY_EPS:
        return AngleInterval(0.0, 0.0, whole=True)
    if phi > 2.0 * half_angle + PAIR_SPAN_TOL:
        return None
    dirs = boundary_directions(o, av, np.asarray(b, dtype=float), half_angle)
    if len(dirs) == 1:
        _, theta = projected_angle(o, av, dirs[0])
        return AngleInterval(theta, theta)
    _, t1 = projected_angle(o, av, dirs[0])
    _, t2 = projected_angle(o, av, dirs[1])
    # pick the arc whose midpoint cone actually covers B
    mid = wrap_angle(t1 + 0.5 * ((t2 - t1) % TWO_PI))
    d_mid, _ = angle_to_direction(o, av, mid, half_angle)
    ang = math.atan2(float(np.linalg.norm(np.cross(d_mid, e_ob))),
                     float(np.dot(d_mid, e_ob)))
    if ang <= half_angle + ANGLE_TOL:
        return AngleInterval(t1, t2)
    return AngleInterval(t2, t1)


def sort_endpoints(endpoints: Iterable[AngleEndpoint]) -> list[AngleEndpoint]:
    """Ascending by angle; at equal angles closing endpoints come first."""
    return sorted(endpoints, key=lambda e: (e.theta, 0 if e.delta == 1 else 1, e.eta))


def maximal_ranges(endpoints: Sequence[AngleEndpoint],
                   coverage_at: Callable[[float], frozenset[int]]) -> list[MaximalRange]:
    """Extract the locally-maximal ranges from sorted interval endpoints.

    A range runs from an opening endpoint to the next endpoint around the
    circle when that neighbour is a closing one (the last endpoint wraps to
    the first). ``coverage_at`` maps a plane angle to the covered node set
    and is evaluated at each range's wrapped midpoint.
    """
    if not endpoints:
        raise ValueError("endpoint list is empty")
    eps = sort_endpoints(endpoints)
    kappa = len(eps)
    out = []
    for i in range(kappa):
        lo = eps[i]
        hi = eps[(i + 1) % kappa]
        if lo.delta != 0 or hi.delta != 1:
            continue
        mid = wrap_angle(lo.theta + 0.5 * ((hi.theta - lo.theta) % TWO_PI))
        out.append(MaximalRange(start=lo, end=hi, covered=coverage_at(mid)))
    return out


def representative_angle(rng: MaximalRange) -> float:
    """Initial plane angle for a range, weighted by the endpoint intervals.

    The angle splits the range in inverse proportion to the originating
    interval lengths: an endpoint whose interval is long pulls the
    representative toward the other end less. Arithmetic happens in an
    unwrapped local frame (end unwrapped past start) and wraps at the end.
    """
    t0 = rng.start.theta
    span = (rng.end.theta - t0) % TWO_PI
    sa = rng.start.sigma
    sb = rng.end.sigma
    hi = t0 + span
    if sa + sb > 1e-15:
        theta_rep = (hi * sa + t0 * sb) / (sa + sb)
    else:
        theta_rep = t0 + 0.5 * span
    return wrap_angle(theta_rep)


def representative_direction(origin, a, rng: MaximalRange, half_angle: float,
                             units: np.ndarray, ids: np.ndarray,
                             *, steps: int = 64) -> np.ndarray:
    """Collapse a maximal range to one refined beam direction.

    Starts from :func:`representative_angle`, then refines by sampling
    ``steps + 1`` points on the segment from the plane point toward A and
    keeping the one that minimizes the largest axis-to-node angle while
    still covering everything the initial direction covered.

    ``units``/``ids`` are the unit offsets and node ids of the position's
    non-apex reach nodes.
    """
    theta_rep = representative_angle(rng)
    d_rep, p_rep = angle_to_direction(origin, a, theta_rep, half_angle)
    av = np.asarray(a, dtype=float)
    o = np.asarray(origin, dtype=float)
    fracs = np.linspace(0.0, 1.0, steps + 1)
    pts = p_rep[None, :] + fracs[:, None] * (av - p_rep)[None, :]
    vecs = pts - o[None, :]
    norms = np.linalg.norm(vecs, axis=1)
    dirs = vecs / norms[:, None]

    ang = np.arccos(np.clip(dirs @ units.T, -1.0, 1.0))
    masks = ang <= half_angle + ANGLE_TOL
    base = masks[0]
    feasible = ~(base & ~masks).any(axis=1)
    obj = np.where(masks, ang, -np.inf).max(axis=1)
    obj = np.where(feasible, obj, np.inf)
    return dirs[int(np.argmin(obj))]


def coverage_mask(units: np.ndarray, direction: np.ndarray,
                  half_angle: float, *, tol: float = ANGLE_TOL) -> np.ndarray:
    """Boolean mask of unit offsets within the beam's half-angle."""
    ang = np.arccos(np.clip(units @ np.asarray(direction, dtype=float), -1.0, 1.0))
    return ang <= half_angle + tol


def synthesize_directions(node_positions: np.ndarray,
                          charging_positions: np.ndarray,
                          half_angle: float, d_max: float,
                          *, refine_steps: int = 64,
                          debug_path: str | Path | None = None) -> list[PosDirPair]:
    """Minimal per-position beam sets covering every locally-maximal node set.

    For each charging position, every node within reach ``d_max`` is
    projected onto the unit sphere; the per-reference angular sweep yields
    candidate beams, which are pruned to one beam per distinct maximal
    covered set. Positions whose reach is empty contribute nothing. The
    output order is deterministic: positions in input order, beams sorted by
    covered set then direction.

    When ``debug_path`` is given, a JSON artifact with the per-reference
    ranges and the surviving pairs is written there.
    """
    nodes = np.asarray(node_positions, dtype=float)
    positions = np.atleast_2d(np.asarray(charging_positions, dtype=float))
    pairs: list[PosDirPair] = []
    debug: list[dict] = []

    for pi in range(positions.shape[0]):
        o = positions[pi]
        delta = nodes - o[None, :]
        dist = np.linalg.norm(delta, axis=1)
        in_reach = dist <= d_max
        apex_sel = in_reach & (dist < APEX_EPS)
        unit_sel = in_reach & ~apex_sel
        apex_ids = frozenset(int(i) for i in np.where(apex_sel)[0])
        ids = np.where(unit_sel)[0]
        dbg_refs: list[dict] = []

        if ids.size == 0:
            if apex_ids:
                pairs.append(PosDirPair(o.copy(), _Z.copy(), apex_ids, pi))
                if debug_path is not None:
                    debug.append({"position_index": pi, "position": o.tolist(),
                                  "references": [], "pairs": [
                                      {"direction": _Z.tolist(),
                                       "covered": sorted(apex_ids)}]})
            continue

        units = delta[ids] / dist[ids, None]
        collected: list[tuple[np.ndarray, frozenset[int]]] = []

        for ri in range(ids.size):
            a_id = int(ids[ri])
            unit_a = units[ri]
            a_point = o + unit_a
            seps = np.arccos(np.clip(units @ unit_a, -1.0, 1.0))
            cand = np.where(seps <= 2.0 * half_angle + PAIR_SPAN_TOL)[0]
            dbg_ranges: list[dict] = []

            if cand.size <= 1:
                mask = coverage_mask(units, unit_a, half_angle)
                collected.append((unit_a.copy(), frozenset(int(i) for i in ids[mask])))
                continue

            endpoints: list[AngleEndpoint] = []
            point_ranges: list[tuple[float, int]] = []
            for ci in cand:
                if ci == ri or seps[ci] < SAME_RAY_EPS:
                    continue
                b_id = int(ids[ci])
                interval = coverage_angle_range(o, a_point, o + units[ci], half_angle)
                if interval is None or interval.whole:
                    continue
                span = interval.span()
                if span < 1e-12:
                    point_ranges.append((interval.start, b_id))
                    continue
                tau = (interval.start, interval.end)
                endpoints.append(AngleEndpoint(interval.start, 0, b_id, span, tau))
                endpoints.append(AngleEndpoint(interval.end, 1, b_id, span, tau))

            def cov_at(theta: float) -> frozenset[int]:
                d, _ = angle_to_direction(o, a_point, theta, half_angle)
                return frozenset(int(i) for i in ids[coverage_mask(units, d, half_angle)])

            ranges: list[MaximalRange] = []
            if endpoints:
                ranges.extend(maximal_ranges(endpoints, cov_at))
            for theta_star, b_id in point_ranges:
                ep0 = AngleEndpoint(theta_star, 0, b_id, 0.0, (theta_star, theta_star))
                ep1 = AngleEndpoint(theta_star, 1, b_id, 0.0, (theta_star, theta_star))
                ranges.append(MaximalRange(ep0, ep1, cov_at(theta_star)))

            if not ranges:
                # every neighbour shares A's ray: the axis beam covers them all
                mask = coverage_mask(units, unit_a, half_angle)
                collected.append((unit_a.copy(), frozenset(int(i) for i in ids[mask])))
                continue

            for rng in ranges:
                d = representative_direction(o, a_point, rng, half_angle,
                                             units, ids, steps=refine_steps)
                mask = coverage_mask(units, d, half_angle)
                collected.append((d, frozenset(int(i) for i in ids[mask])))
                if debug_path is not None:
                    dbg_ranges.append({"start": rng.start.theta, "end": rng.end.theta,
                                       "covered": sorted(rng.covered)})
            if debug_path is not None:
                dbg_refs.append({"node": a_id, "ranges": dbg_ranges})

        # one beam per distinct covered set: lexicographically smallest direction
        by_set: dict[frozenset[int], np.ndarray] = {}
        for d, cov in collected:
            cur = by_set.get(cov)
            if cur is None or tuple(d) < tuple(cur):
                by_set[cov] = d
        # drop sets strictly contained in another set at this position
        sets = list(by_set.keys())
        keep = []
        for s in sets:
            if not any(s < t for t in sets):
                keep.append(s)

        pos_pairs = [(by_set[s], s | apex_ids) for s in keep]
        pos_pairs.sort(key=lambda p: (tuple(sorted(p[1])), tuple(p[0])))
        for d, cov in pos_pairs:
            pairs.append(PosDirPair(o.copy(), d, frozenset(cov), pi))

        if debug_path is not None:
            debug.append({"position_index": pi, "position": o.tolist(),
                          "references": dbg_refs,
                          "pairs": [{"direction": d.tolist(), "covered": sorted(cov)}
                                    for d, cov in pos_pairs]})

    if debug_path is not None:
        Path(debug_path).write_text(json.dumps({"positions": debug}, indent=1))
    return pairs
