"""Closed-tour construction over the charging positions.

The UAV starts and ends at the base, visiting every active position once.
``greedy_tour`` builds a nearest-neighbour order; ``improve_tour`` polishes
it with alternating first-improvement 2-opt and Or-opt passes (segment
relocations of length 1-3, tried forward and reversed) until neither finds
a shorter cycle, then escapes that local optimum with a few double-bridge
restarts (seeded, so runs stay reproducible) and keeps the best route seen.
Both are deterministic; ties fall to the smallest index.
``brute_force_tour`` enumerates permutations for cross-checks on tiny
instances.

Internally routes are index sequences over a (m+1)-point distance matrix
whose row 0 is the base; the public ``Tour.order`` uses position indices
0..m-1 and never contains the base.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

IMPROVE_EPS = 1e-12


@dataclass
class Tour:
    """Visit order over the charging positions plus the closed-cycle length."""

    order: list[int]
    length: float

    def __post_init__(self):
        self.order = [int(i) for i in self.order]
        self.length = float(self.length)


def _distance_matrix(base: np.ndarray, positions: np.ndarray) -> np.ndarray:
    pts = np.vstack([np.asarray(base, float)[None, :],
                     np.asarray(positions, float)])
    diff = pts[:, None, :] - pts[None, :, :]
    return np.linalg.norm(diff, axis=2)


def _route_length(dist: np.ndarray, route: np.ndarray) -> float:
    closed = np.concatenate([[0], route, [0]])
    return float(dist[closed[:-1], closed[1:]].sum())


def tour_length(positions: np.ndarray, base: np.ndarray,
                order: list[int]) -> float:
    """Length of the closed base -> order -> base cycle."""
    positions = np.asarray(positions, dtype=float)
    if len(order) == 0:
        return 0.0
    dist = _distance_matrix(base, positions)
    return _route_length(dist, np.asarray(order, dtype=int) + 1)


def greedy_tour(positions: np.ndarray, base: np.ndarray) -> Tour:
    """Nearest-neighbour order from the base, smallest index on ties."""
    positions = np.asarray(positions, dtype=float)
    m = positions.shape[0]
    if m == 0:
        return Tour(order=[], length=0.0)
    dist = _distance_matrix(base, positions)
    unvisited = np.ones(m + 1, dtype=bool)
    unvisited[0] = False
    route = []
    here = 0
    for _ in range(m):
        d = np.where(unvisited, dist[here], np.inf)
        nxt = int(np.argmin(d))  # argmin takes the first minimum: index tie rule
        route.append(nxt)
        unvisited[nxt] = False
        here = nxt
    route = np.array(route, dtype=int)
    return Tour(order=(route - 1).tolist(), length=_route_length(dist, route))


def _two_opt_pass(dist: np.ndarray, route: np.ndarray) -> bool:
    """Apply the first improving segment reversal; True when one was made."""
    m = route.shape[0]
    ext = np.concatenate([[0], route, [0]])
    for i in range(1, m):
        a = ext[i - 1]
        b = ext[i]
        # reversing ext[i..j] replaces edges (a,b) and (ext[j], ext[j+1])
        js = np.arange(i, m + 1)
        tails = ext[js]
        nexts = ext[js + 1]
        delta = dist[a, tails] + dist[b, nexts] - dist[a, b] - dist[tails, nexts]
        hit = np.where(delta < -IMPROVE_EPS)[0]
        if hit.size:
            j = int(js[hit[0]])
            ext[i:j + 1] = ext[i:j + 1][::-1]
            route[:] = ext[1:-1]
            return True
    return False


def _or_opt_pass(dist: np.ndarray, route: np.ndarray) -> bool:
    """Relocate the first improving 1-3 point segment; True when moved."""
    m = route.shape[0]
    ext = np.concatenate([[0], route, [0]])
    for seg_len in (1, 2, 3):
        if seg_len >= m:
            break
        for i in range(1, m - seg_len + 2):
            a, b = ext[i - 1], ext[i + seg_len]
            s0, s1 = ext[i], ext[i + seg_len - 1]
            removal = dist[a, s0] + dist[s1, b] - dist[a, b]
            if removal <= IMPROVE_EPS:
                continue
            rest = np.concatenate([ext[:i], ext[i + seg_len:]])
            u = rest[:-1]
            v = rest[1:]
            base_cost = dist[u, v]
            fwd = dist[u, s0] + dist[s1, v] - base_cost - removal
            rev = dist[u, s1] + dist[s0, v] - base_cost - removal
            # position i-1 in `rest` reinserts the segment where it came from
            # (in-place reversals are the 2-opt pass's job, so mask both)
            fwd[i - 1] = np.inf
            rev[i - 1] = np.inf
            best_fwd = int(np.argmin(fwd))
            best_rev = int(np.argmin(rev))
            use_rev = rev[best_rev] < fwd[best_fwd]
            j = best_rev if use_rev else best_fwd
            if min(rev[best_rev], fwd[best_fwd]) < -IMPROVE_EPS:
                seg = ext[i:i + seg_len][::-1] if use_rev else ext[i:i + seg_len]
                new_ext = np.concatenate([rest[:j + 1], seg, rest[j + 1:]])
                route[:] = new_ext[1:-1]
                return True
    return False


def _descend(dist: np.ndarray, route: np.ndarray,
             moves: int, move_budget: int) -> int:
    """Run 2-opt/Or-opt passes in place until neither improves.

    Returns the updated applied-move count; stops early at ``move_budget``.
    """
    while moves < move_budget:
        if _two_opt_pass(dist, route):
            moves += 1
            continue
        if _or_opt_pass(dist, route):
            moves += 1
            continue
        break
    return moves


KICK_ROUNDS = 12


def _double_bridge(rng: np.random.Generator, route: np.ndarray) -> np.ndarray:
    """Classic 4-segment reconnection A|B|C|D -> A|C|B|D (needs m >= 4)."""
    m = route.shape[0]
    cuts = np.sort(rng.choice(np.arange(1, m), size=3, replace=False))
    p, q, r = (int(c) for c in cuts)
    return np.concatenate([route[:p], route[q:r], route[p:q], route[r:]])


def improve_tour(positions: np.ndarray, base: np.ndarray,
                 *, move_budget: int | None = None) -> Tour:
    """Greedy start refined by 2-opt and Or-opt, plus restart kicks.

    After the first descent stalls, up to ``KICK_ROUNDS`` double-bridge
    perturbations of the incumbent are re-descended and adopted only when
    strictly shorter, so the result never regresses below the plain
    descent. The kick sequence is seeded: equal inputs give equal tours.

    ``move_budget`` caps the number of applied moves, kicks included
    (default 50 m^2); the cap only matters as a hard stop, convergence is
    normally far quicker. A zero budget returns the greedy order as-is.
    """
    positions = np.asarray(positions, dtype=float)
    m = positions.shape[0]
    start = greedy_tour(positions, base)
    if m <= 2:
        return start
    if move_budget is None:
        move_budget = 50 * m * m
    dist = _distance_matrix(base, positions)
    route = np.asarray(start.order, dtype=int) + 1
    moves = _descend(dist, route, 0, move_budget)
    best_route = route
    best_len = _route_length(dist, best_route)
    if m >= 4:
        rng = np.random.default_rng(8561)
        for _ in range(KICK_ROUNDS):
            if moves >= move_budget:
                break
            trial = _double_bridge(rng, best_route)
            moves = _descend(dist, trial, moves + 1, move_budget)
            trial_len = _route_length(dist, trial)
            if trial_len < best_len - IMPROVE_EPS:
                best_route, best_len = trial, trial_len
    return Tour(order=(best_route - 1).tolist(), length=best_len)


def brute_force_tour(positions: np.ndarray, base: np.ndarray) -> Tour:
    """Exact optimum by permutation enumeration; only for m <= 9.

    All m! routes are scored in one vectorized pass; ties go to the
    lexicographically first permutation.
    """
    positions = np.asarray(positions, dtype=float)
    m = positions.shape[0]
    if m > 9:
        raise ValueError("brute force is limited to nine positions")
    if m == 0:
        return Tour(order=[], length=0.0)
    dist = _distance_matrix(base, positions)
    perms = np.array(list(itertools.permutations(range(1, m + 1))), dtype=int)
    zeros = np.zeros((perms.shape[0], 1), dtype=int)
    closed = np.hstack([zeros, perms, zeros])
    lengths = dist[closed[:, :-1], closed[:, 1:]].sum(axis=1)
    best = int(np.argmin(lengths))
    return Tour(order=(perms[best] - 1).tolist(), length=float(lengths[best]))
