"""Comparison strategies for each pipeline stage.

Charging positions can be taken from the nodes themselves, a pruned regular
lattice, k-means-style cluster centers, or greedy groups under a minimum
enclosing sphere. Beam directions can point at individual nodes, enumerate
every pairwise-tangent cone, merge those greedily, or use the face normals
of a regular polyhedron; ``funceqv`` delegates to the sweep synthesis.
Tours come from the nearest-neighbour loop, the 2-opt/Or-opt improver, or
an ant-colony search. Method names double as the CLI spellings, composed as
``position:direction:tour`` labels.

All generators recompute exact covered sets with the same reach and apex
conventions as the sweep synthesis, so families from different methods are
directly comparable in the charging-time program.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .directions import APEX_EPS, PAIR_SPAN_TOL, PosDirPair, coverage_mask, \
    synthesize_directions
from .geometry import boundary_directions, normalize
from .tour import Tour, greedy_tour, improve_tour

POSITION_METHODS = ("node", "grid", "cluster", "group")
DIRECTION_METHODS = ("funceqv", "node", "gcc", "acc", "polyhedron")
TOUR_METHODS = ("lkh_style", "greedy", "aco")

_Z = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class MethodChoice:
    """One strategy per pipeline stage, e.g. ``node:funceqv:lkh_style``."""

    position_method: str = "node"
    direction_method: str = "funceqv"
    tour_method: str = "lkh_style"

    def __post_init__(self):
        if self.position_method not in POSITION_METHODS:
            raise ValueError(f"unknown position method {self.position_method!r}")
        if self.direction_method not in DIRECTION_METHODS:
            raise ValueError(f"unknown direction method {self.direction_method!r}")
        if self.tour_method not in TOUR_METHODS:
            raise ValueError(f"unknown tour method {self.tour_method!r}")

    @classmethod
    def parse(cls, text: str) -> "MethodChoice":
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(
                f"scheme {text!r} is not of the form position:direction:tour")
        return cls(*parts)

    @property
    def label(self) -> str:
        return f"{self.position_method}:{self.direction_method}:{self.tour_method}"


# --------------------------------------------------------------------------
# charging positions


def min_enclosing_sphere(points: np.ndarray) -> tuple[np.ndarray, float]:
    """Exact smallest sphere containing all points (center, radius).

    Recursive boundary-set construction; the sphere is unique, so the fixed
    internal shuffle (a speed device) never shows in the result.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("need at least one point")
    order = np.random.default_rng(0).permutation(pts.shape[0])
    pts = pts[order]

    def sphere_from(boundary: list[np.ndarray]) -> tuple[np.ndarray, float]:
        if not boundary:
            return np.zeros(3), -1.0
        b = np.asarray(boundary)
        if b.shape[0] == 1:
            return b[0].copy(), 0.0
        p0 = b[0]
        a = b[1:] - p0
        m = a @ a.T
        lam, *_ = np.linalg.lstsq(2.0 * m, np.einsum("ij,ij->i", a, a),
                                  rcond=None)
        center = p0 + lam @ a
        return center, float(np.linalg.norm(center - p0))

    def welzl(i: int, boundary: list[np.ndarray]) -> tuple[np.ndarray, float]:
        if i == pts.shape[0] or len(boundary) == 4:
            return sphere_from(boundary)
        center, radius = welzl(i + 1, boundary)
        if radius >= 0 and np.linalg.norm(pts[i] - center) <= radius * (1 + 1e-12) + 1e-9:
            return center, radius
        return welzl(i + 1, boundary + [pts[i]])

    import sys
    limit = sys.getrecursionlimit()
    if pts.shape[0] + 50 > limit:
        sys.setrecursionlimit(pts.shape[0] + 100)
    try:
        center, radius = welzl(0, [])
    finally:
        sys.setrecursionlimit(limit)
    return center, max(radius, 0.0)


def _grid_positions(nodes: np.ndarray, d_max: float, spacing: float) -> np.ndarray:
    axes = [np.arange(nodes[:, k].min(), nodes[:, k].max() + spacing, spacing)
            for k in range(3)]
    gx, gy, gz = np.meshgrid(*axes, indexing="ij")
    lattice = np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=1)
    d2 = ((lattice[:, None, :] - nodes[None, :, :]) ** 2).sum(axis=2)
    keep = (d2.min(axis=1) <= d_max * d_max)
    return lattice[keep]


def _kmeans_radius(nodes: np.ndarray, k: int) -> tuple[np.ndarray, float]:
    """Deterministic k-means: farthest-point seeding plus Lloyd iterations."""
    n = nodes.shape[0]
    centers = [nodes[0]]
    d_min = np.linalg.norm(nodes - nodes[0], axis=1)
    for _ in range(1, k):
        nxt = int(np.argmax(d_min))
        centers.append(nodes[nxt])
        d_min = np.minimum(d_min, np.linalg.norm(nodes - nodes[nxt], axis=1))
    centers = np.array(centers)
    assign = np.zeros(n, dtype=int)
    for it in range(100):
        d = np.linalg.norm(nodes[:, None, :] - centers[None, :, :], axis=2)
        new_assign = np.argmin(d, axis=1)
        if it > 0 and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for j in range(k):
            sel = assign == j
            if np.any(sel):
                centers[j] = nodes[sel].mean(axis=0)
    d = np.linalg.norm(nodes - centers[assign], axis=1)
    return centers, float(d.max())


def _cluster_positions(nodes: np.ndarray, d_max: float) -> np.ndarray:
    n = nodes.shape[0]
    k = 1
    while k < n:
        _, radius = _kmeans_radius(nodes, k)
        if radius <= d_max:
            break
        k = min(2 * k, n)
    lo = max(1, k // 2)
    best = k
    while lo < best:
        mid = (lo + best) // 2
        _, radius = _kmeans_radius(nodes, mid)
        if radius <= d_max:
            best = mid
        else:
            lo = mid + 1
    centers, radius = _kmeans_radius(nodes, best)
    if radius > d_max:  # pathological geometry: fall back to one node each
        return nodes.copy()
    return centers


def _group_positions(nodes: np.ndarray, d_max: float) -> np.ndarray:
    n = nodes.shape[0]
    ungrouped = list(range(n))
    centers = []
    while ungrouped:
        seed = ungrouped.pop(0)
        members = [seed]
        center = nodes[seed].copy()
        radius = 0.0
        grown = True
        while grown and ungrouped:
            grown = False
            dists = np.linalg.norm(nodes[ungrouped] - center, axis=1)
            # a point farther than 2 d_max + r can never fit in a d_max sphere
            order = np.argsort(dists, kind="stable")
            for oi in order:
                if dists[oi] > 2.0 * d_max + radius:
                    break
                j = ungrouped[oi]
                c2, r2 = min_enclosing_sphere(nodes[members + [j]])
                if r2 <= d_max + 1e-9:
                    members.append(j)
                    ungrouped.remove(j)
                    center, radius = c2, r2
                    grown = True
                    break
        centers.append(center)
    return np.array(centers)


def generate_positions(node_positions: np.ndarray, method: str, d_max: float,
                       *, grid_spacing: float | None = None) -> np.ndarray:
    """Candidate charging positions for the given strategy.

    ``grid_spacing`` defaults to d_max/sqrt(3) so every point of the node
    bounding box lies within d_max of some lattice point.
    """
    nodes = np.asarray(node_positions, dtype=float)
    if method not in POSITION_METHODS:
        raise ValueError(f"unknown position method {method!r}")
    if nodes.shape[0] == 0:
        return np.zeros((0, 3))
    if method == "node":
        return nodes.copy()
    if method == "grid":
        spacing = d_max / np.sqrt(3.0) if grid_spacing is None else float(grid_spacing)
        if spacing <= 0:
            raise ValueError("grid spacing must be positive")
        return _grid_positions(nodes, d_max, spacing)
    if method == "cluster":
        return _cluster_positions(nodes, d_max)
    return _group_positions(nodes, d_max)


# --------------------------------------------------------------------------
# beam directions


def polyhedron_directions(kind: str = "icosahedron") -> np.ndarray:
    """Unit direction fan through the face centers of a regular solid.

    ``icosahedron`` gives the 20 triangular face normals; ``soccer`` adds the
    12 vertex directions (the pentagon centers of the truncated solid) for a
    32-beam fan. Rows are sorted lexicographically.
    """
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = []
    for a in (-1.0, 1.0):
        for b in (-phi, phi):
            verts.extend([(0.0, a, b), (a, b, 0.0), (b, 0.0, a)])
    verts = np.array(verts)
    from scipy.spatial import ConvexHull

    hull = ConvexHull(verts)
    faces = np.array([normalize(verts[s].mean(axis=0)) for s in hull.simplices])
    if kind == "icosahedron":
        dirs = faces
    elif kind == "soccer":
        corners = np.array([normalize(v) for v in verts])
        dirs = np.vstack([faces, corners])
    else:
        raise ValueError(f"unknown polyhedron {kind!r}")
    order = np.lexsort((dirs[:, 2], dirs[:, 1], dirs[:, 0]))
    return dirs[order]


def _reach_split(o: np.ndarray, nodes: np.ndarray, d_max: float):
    delta = nodes - o[None, :]
    dist = np.linalg.norm(delta, axis=1)
    in_reach = dist <= d_max
    apex_sel = in_reach & (dist < APEX_EPS)
    unit_sel = in_reach & ~apex_sel
    ids = np.where(unit_sel)[0]
    apex_ids = frozenset(int(i) for i in np.where(apex_sel)[0])
    units = delta[ids] / dist[ids, None] if ids.size else np.zeros((0, 3))
    return ids, units, apex_ids


def _exact_pairs(o: np.ndarray, pi: int, dirs: Iterable[np.ndarray],
                 ids: np.ndarray, units: np.ndarray,
                 apex_ids: frozenset, half_angle: float) -> list[PosDirPair]:
    out = []
    for d in dirs:
        cov = frozenset(int(i) for i in ids[coverage_mask(units, d, half_angle)])
        cov |= apex_ids
        if cov:
            out.append(PosDirPair(o.copy(), np.asarray(d, float).copy(), cov, pi))
    return out


def _gcc_dirs(o: np.ndarray, units: np.ndarray, half_angle: float) -> list[np.ndarray]:
    dirs = [units[i].copy() for i in range(units.shape[0])]
    for i in range(units.shape[0]):
        for j in range(i + 1, units.shape[0]):
            sep = float(np.arccos(np.clip(np.dot(units[i], units[j]), -1, 1)))
            if sep < 1e-12 or sep > 2.0 * half_angle + PAIR_SPAN_TOL:
                continue
            dirs.extend(boundary_directions(o, o + units[i], o + units[j],
                                            half_angle))
    return dirs


def _union_cone_axis(units_sel: np.ndarray, o: np.ndarray,
                     half_angle: float) -> np.ndarray | None:
    """Axis of a single cone covering all given unit rays, if one exists.

    Candidate axes come from the most-separated ray pair: their two tangent
    beams, or the ray itself for a nearly-degenerate spread.
    """
    m = units_sel.shape[0]
    if m == 0:
        return _Z.copy()
    if m == 1:
        return units_sel[0].copy()
    dots = np.clip(units_sel @ units_sel.T, -1.0, 1.0)
    seps = np.arccos(dots)
    i, j = np.unravel_index(np.argmax(seps), seps.shape)
    if seps[i, j] > 2.0 * half_angle + PAIR_SPAN_TOL:
        return None
    if seps[i, j] < 1e-12:
        candidates = [units_sel[0]]
    else:
        candidates = boundary_directions(o, o + units_sel[i], o + units_sel[j],
                                         half_angle)
    for cand in candidates:
        if np.all(coverage_mask(units_sel, cand, half_angle)):
            return np.asarray(cand, float)
    return None


def _acc_merge(o: np.ndarray, pi: int, pairs: list[PosDirPair],
               ids: np.ndarray, units: np.ndarray, apex_ids: frozenset,
               half_angle: float) -> list[PosDirPair]:
    """Greedily merge beam pairs whose union fits one cone, biggest first.

    Each round ranks candidate pairs by (-union size, i, j) and merges the
    first whose union passes the single-cone test. The pairwise scan is
    pre-filtered in bulk: a pair can only merge if the widest ray separation
    across its union is within the cone span, which is exactly the first
    check _union_cone_axis performs, so the filter never changes the result.
    """
    row_of = {int(node): r for r, node in enumerate(ids)}
    a = units.shape[0]
    seps_all = np.arccos(np.clip(units @ units.T, -1.0, 1.0))
    limit = 2.0 * half_angle + PAIR_SPAN_TOL
    axes = [p.direction.copy() for p in pairs]
    covs = [p.covered for p in pairs]
    masks = np.zeros((len(pairs), a), dtype=bool)
    for k, cov in enumerate(covs):
        for nid in cov - apex_ids:
            masks[k, row_of[nid]] = True
    # beams are immutable once created, so a pair that failed the cone test
    # once can be skipped forever; ids stay stable across list reshuffles
    bids = list(range(len(axes)))
    next_bid = len(axes)
    failed: set[tuple[int, int]] = set()
    while len(axes) > 1:
        # widest separation between any ray of beam k and each ray q
        beam_sep = np.where(masks[:, :, None], seps_all[None, :, :],
                            -np.inf).max(axis=1)
        union = masks[:, None, :] | masks[None, :, :]
        spread = np.where(union, np.maximum(beam_sep[:, None, :],
                                            beam_sep[None, :, :]),
                          -np.inf).max(axis=2)
        i_idx, j_idx = np.triu_indices(len(axes), k=1)
        ok = spread[i_idx, j_idx] <= limit
        order = np.lexsort((j_idx[ok], i_idx[ok],
                            -union.sum(axis=2)[i_idx[ok], j_idx[ok]]))
        merged = None
        for pick in order:
            i = int(i_idx[ok][pick])
            j = int(j_idx[ok][pick])
            pair_key = (bids[i], bids[j]) if bids[i] < bids[j] \
                else (bids[j], bids[i])
            if pair_key in failed:
                continue
            rows = np.where(masks[i] | masks[j])[0]
            axis = _union_cone_axis(units[rows], o, half_angle)
            if axis is None:
                failed.add(pair_key)
                continue
            merged = (i, j, axis)
            break
        if merged is None:
            break
        i, j, axis = merged
        new_mask = coverage_mask(units, axis, half_angle)
        cov = frozenset(int(n) for n in ids[new_mask]) | apex_ids
        keep = [k for k in range(len(axes)) if k not in (i, j)]
        axes = [axes[k] for k in keep] + [np.asarray(axis, float)]
        covs = [covs[k] for k in keep] + [cov]
        masks = np.vstack([masks[keep], new_mask[None, :]])
        bids = [bids[k] for k in keep] + [next_bid]
        next_bid += 1
    return [PosDirPair(o.copy(), d.copy(), cov, pi)
            for d, cov in zip(axes, covs)]


def generate_directions_baseline(charging_positions: np.ndarray,
                                 node_positions: np.ndarray, method: str,
                                 half_angle: float, d_max: float, *,
                                 polyhedron_kind: str = "icosahedron",
                                 refine_steps: int = 64) -> list[PosDirPair]:
    """Beam family for the given direction strategy, with exact covered sets.

    Positions whose reach is empty contribute nothing; a position holding
    only an apex node emits the +z fallback beam, mirroring the synthesis.
    """
    if method not in DIRECTION_METHODS:
        raise ValueError(f"unknown direction method {method!r}")
    nodes = np.asarray(node_positions, dtype=float)
    positions = np.atleast_2d(np.asarray(charging_positions, dtype=float))
    if method == "funceqv":
        return synthesize_directions(nodes, positions, half_angle, d_max,
                                     refine_steps=refine_steps)
    poly = polyhedron_directions(polyhedron_kind) if method == "polyhedron" else None

    pairs: list[PosDirPair] = []
    for pi in range(positions.shape[0]):
        o = positions[pi]
        ids, units, apex_ids = _reach_split(o, nodes, d_max)
        if ids.size == 0:
            if apex_ids:
                pairs.append(PosDirPair(o.copy(), _Z.copy(), apex_ids, pi))
            continue
        if method == "node":
            dirs = [units[i].copy() for i in range(ids.size)]
            pairs.extend(_exact_pairs(o, pi, dirs, ids, units, apex_ids,
                                      half_angle))
        elif method == "gcc":
            dirs = _gcc_dirs(o, units, half_angle)
            pairs.extend(_exact_pairs(o, pi, dirs, ids, units, apex_ids,
                                      half_angle))
        elif method == "acc":
            base_pairs = _exact_pairs(o, pi, _gcc_dirs(o, units, half_angle),
                                      ids, units, apex_ids, half_angle)
            pairs.extend(_acc_merge(o, pi, base_pairs, ids, units, apex_ids,
                                    half_angle))
        else:  # polyhedron
            pairs.extend(_exact_pairs(o, pi, poly, ids, units, apex_ids,
                                      half_angle))
    return pairs


# --------------------------------------------------------------------------
# tours


@dataclass(frozen=True)
class AcoParams:
    """Ant-colony settings (pheromone weight alpha, visibility weight beta,
    evaporation rho); defaults follow common ant-system practice."""

    ants: int = 20
    iterations: int = 200
    alpha: float = 1.0
    beta: float = 5.0
    rho: float = 0.5
    deposit: float = 1.0

    def __post_init__(self):
        if self.ants < 1 or self.iterations < 0:
            raise ValueError("need at least one ant and nonnegative iterations")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("evaporation must lie in [0, 1]")


def aco_tour(positions: np.ndarray, base: np.ndarray, *,
             params: AcoParams = AcoParams(), seed: int = 0) -> Tour:
    """Ant-colony tour over the positions, seeded and vectorized across ants."""
    positions = np.asarray(positions, dtype=float)
    m = positions.shape[0]
    if m <= 2:
        return greedy_tour(positions, base)
    rng = np.random.default_rng(seed)
    pts = np.vstack([np.asarray(base, float)[None, :], positions])
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    eta = 1.0 / (dist + 1e-12)
    np.fill_diagonal(eta, 0.0)

    start = greedy_tour(positions, base)
    tau0 = params.ants / max(start.length, 1e-9)
    tau = np.full((m + 1, m + 1), tau0)
    best_route = np.asarray(start.order, dtype=int) + 1
    best_len = start.length
    ant_ids = np.arange(params.ants)

    for _ in range(params.iterations):
        current = np.zeros(params.ants, dtype=int)
        visited = np.zeros((params.ants, m + 1), dtype=bool)
        visited[:, 0] = True
        routes = np.zeros((params.ants, m), dtype=int)
        for step in range(m):
            weights = (tau[current] ** params.alpha) * (eta[current] ** params.beta)
            weights[visited] = 0.0
            cum = np.cumsum(weights, axis=1)
            draw = rng.random(params.ants) * cum[:, -1]
            nxt = np.minimum((cum <= draw[:, None]).sum(axis=1), m)
            routes[:, step] = nxt
            visited[ant_ids, nxt] = True
            current = nxt
        closed = np.hstack([np.zeros((params.ants, 1), int), routes,
                            np.zeros((params.ants, 1), int)])
        lengths = dist[closed[:, :-1], closed[:, 1:]].sum(axis=1)
        tau *= (1.0 - params.rho)
        contrib = params.deposit / lengths
        heads = closed[:, :-1].ravel()
        tails = closed[:, 1:].ravel()
        np.add.at(tau, (heads, tails), np.repeat(contrib, m + 1))
        np.add.at(tau, (tails, heads), np.repeat(contrib, m + 1))
        k = int(np.argmin(lengths))
        if lengths[k] < best_len - 1e-15:
            best_len = float(lengths[k])
            best_route = routes[k].copy()

    return Tour(order=(best_route - 1).tolist(), length=float(best_len))


def tour_baseline(positions: np.ndarray, base: np.ndarray, method: str, *,
                  aco_params: AcoParams = AcoParams(), seed: int = 0) -> Tour:
    """Tour for the given search strategy over the active positions."""
    if method == "greedy":
        return greedy_tour(positions, base)
    if method == "lkh_style":
        return improve_tour(positions, base)
    if method == "aco":
        return aco_tour(positions, base, params=aco_params, seed=seed)
    raise ValueError(f"unknown tour method {method!r}")
