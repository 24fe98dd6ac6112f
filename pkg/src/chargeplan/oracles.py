"""Brute-force cross-checks for the planning primitives.

These validators re-derive results by enumeration or dense sampling and are
deliberately independent of the sweep/LP/tour implementations they check:
the direction oracle enumerates axis and pairwise-tangent beams, the LP
oracle enumerates basic feasible points or grids the feasible region, and
the sampling check tests coverage containment for a cloud of random beams.
They back the test suite and the ``oracle`` CLI subcommand.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .geometry import ANGLE_TOL, normalize


def candidate_directions(units: np.ndarray, half_angle: float) -> np.ndarray:
    """Axis beams plus all pairwise shared-boundary beams for unit offsets.

    Every locally-maximal covered set is attained either by a beam through a
    single node's ray or by a beam holding two covered nodes exactly on its
    boundary, so this finite family exhausts the maximal sets.
    """
    m = units.shape[0]
    dirs = [u for u in units]
    tan_h = math.tan(half_angle)
    for i, j in itertools.combinations(range(m), 2):
        e1, e2 = units[i], units[j]
        c = float(np.dot(e1, e2))
        s = float(np.linalg.norm(np.cross(e1, e2)))
        phi = math.atan2(s, c)
        if phi < 1e-12 or phi > 2.0 * half_angle + 1e-10:
            continue
        half = 0.5 * phi
        bisector = normalize(e1 + e2)
        disc = tan_h * tan_h - math.tan(half) ** 2
        if disc <= 1e-20:
            dirs.append(bisector)
            continue
        base = bisector / math.cos(half)
        off = math.sqrt(disc) * normalize(np.cross(e2, e1))
        dirs.append(normalize(base + off))
        dirs.append(normalize(base - off))
    return np.array(dirs)


def coverage_sets(units: np.ndarray, dirs: np.ndarray, half_angle: float,
                  *, tol: float = ANGLE_TOL) -> list[frozenset[int]]:
    """Covered index set of every beam direction, in input order."""
    ang = np.arccos(np.clip(dirs @ units.T, -1.0, 1.0))
    masks = ang <= half_angle + tol
    return [frozenset(int(i) for i in np.where(row)[0]) for row in masks]


def maximal_family(sets) -> set[frozenset[int]]:
    """Distinct sets not strictly contained in any other set of the family."""
    distinct = set(sets)
    return {s for s in distinct if not any(s < t for t in distinct)}


def enumerate_maximal_sets(units: np.ndarray, half_angle: float) -> set[frozenset[int]]:
    """All locally-maximal covered index sets, by exhaustive beam enumeration."""
    if units.shape[0] == 0:
        return set()
    dirs = candidate_directions(units, half_angle)
    return maximal_family(coverage_sets(units, dirs, half_angle))


def count_containment_violations(pair_sets, units: np.ndarray, half_angle: float,
                                 n_samples: int, seed: int) -> int:
    """Sampled beams whose covered set fits no synthesized pair's covered set.

    Samples ``n_samples`` directions uniformly on the sphere; a sample
    violates containment when its covered index set is not a subset of any
    set in ``pair_sets``. Uses 64-bit set masks, so at most 63 nodes.
    """
    m = units.shape[0]
    if m > 63:
        raise ValueError("bitmask containment check supports at most 63 nodes")
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(n_samples, 3))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    cos_thr = math.cos(half_angle + ANGLE_TOL)
    masks = (dirs @ units.T) >= cos_thr
    weights = (np.uint64(1) << np.arange(m, dtype=np.uint64))
    sample_bits = (masks.astype(np.uint64) * weights[None, :]).sum(axis=1, dtype=np.uint64)
    pair_bits = np.array(
        [np.bitwise_or.reduce(weights[list(s)]) if s else np.uint64(0) for s in pair_sets],
        dtype=np.uint64)
    if pair_bits.size == 0:
        return int(np.count_nonzero(sample_bits))
    contained = (sample_bits[:, None] & ~pair_bits[None, :]) == 0
    return int(np.count_nonzero(~contained.any(axis=1)))


def enumerate_vertex_optimum(c: np.ndarray, a_ub: np.ndarray,
                             b_ub: np.ndarray) -> float | None:
    """Optimal objective of min c.x, A x <= b, x >= 0 by vertex enumeration.

    Every vertex of the feasible polyhedron makes n of the m + n inequality
    constraints active; all such square systems are solved and the feasible
    ones scanned for the best objective. Returns None when no vertex is
    feasible. Only for tiny instances; cost grows as C(m + n, n).
    """
    a_ub = np.asarray(a_ub, dtype=float)
    b_ub = np.asarray(b_ub, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = a_ub.shape
    rows = np.vstack([a_ub, -np.eye(n)])
    rhs = np.concatenate([b_ub, np.zeros(n)])
    best = None
    for active in itertools.combinations(range(m + n), n):
        sub = rows[list(active)]
        sub_rhs = rhs[list(active)]
        try:
            x = np.linalg.solve(sub, sub_rhs)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(x)):
            continue
        if np.any(rows @ x > rhs + 1e-7):
            continue
        val = float(c @ x)
        if best is None or val < best:
            best = val
    return best


def grid_search_charge_times(c_matrix: np.ndarray, e_b: np.ndarray,
                             e_u: np.ndarray, e_d: np.ndarray,
                             p0: float, p_hov: float,
                             *, resolution: float = 1e-3) -> float | None:
    """Grid-search the charging-time objective for at most two beams.

    Evaluates (p0 + p_hov) sum(t) - sum_j min(p0 (Ct)_j, e_u_j - e_b_j) over
    a regular grid of feasible times and returns the best value found, or
    None when no grid point satisfies every node demand. Accuracy is limited
    by the grid pitch; use for coarse cross-checks only.
    """
    c_matrix = np.atleast_2d(np.asarray(c_matrix, dtype=float))
    k, n = c_matrix.shape
    if k > 2:
        raise ValueError("grid oracle supports at most two beams")
    cap = np.asarray(e_u, dtype=float) - np.asarray(e_b, dtype=float)
    e_d = np.asarray(e_d, dtype=float)

    def axis(i):
        rates = c_matrix[i][c_matrix[i] > 0]
        if rates.size == 0:
            return np.array([0.0])
        t_max = float(np.max(cap[c_matrix[i] > 0]) / (p0 * np.min(rates))) * 1.05
        steps = max(2, int(round(t_max / resolution)) + 1)
        # cap the axis so wide time ranges degrade the pitch instead of memory
        steps = min(steps, 4001)
        return np.linspace(0.0, t_max, steps)

    grids = [axis(i) for i in range(k)]
    best = None
    if k == 1:
        tt = grids[0][:, None]
    else:
        g0, g1 = np.meshgrid(grids[0], grids[1], indexing="ij")
        tt = np.stack([g0.ravel(), g1.ravel()], axis=1)
    received = p0 * (tt @ c_matrix)
    feasible = np.all(received >= e_d[None, :] - 1e-12, axis=1)
    if not np.any(feasible):
        return None
    gains = np.minimum(received, cap[None, :]).sum(axis=1)
    obj = (p0 + p_hov) * tt.sum(axis=1) - gains
    best = float(np.min(obj[feasible]))
    return best
