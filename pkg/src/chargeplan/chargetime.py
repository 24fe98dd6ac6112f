"""Optimal per-beam charging times over a fixed family of position/direction
pairs.

Given the transfer-coefficient matrix of the family, the hover times t >= 0
and the per-node useful received energies r are chosen to

    minimize  (p0 + p_hov) * sum(t) - sum(r)

subject to

    r_i <= p0 * (C^T t)_i       (cannot bank more than arrives)
    e_D_i <= r_i <= e_U_i - e_B_i   (demand met, capacity respected)

which is exactly hover-plus-transmit expenditure minus the energy that ends
up stored. Flight cost is independent of t and handled by the tour stage.

Two exhaustive feasibility pre-checks run before the solve: a node whose
demand exceeds its remaining capacity can never be satisfied, and neither
can a positive-demand node that no beam reaches. Past those checks the
program always has an optimal vertex (t = 0 plus slack is feasible for the
relaxation, and the r caps bound the objective from below).

Beams with bitwise-identical coefficient rows are collapsed before the
solve and the combined hover time is reported on the first occurrence;
duplicates arise naturally when several synthesized beams at one position
cover the same node set, and collapsing them removes that source of
alternate optima.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lp import LpProblem, lp_solve, write_lp_text

DEMAND_EPS = 1e-12
CAPACITY_TOL = 1e-9


@dataclass
class ChargeTimeSolution:
    """Outcome of one charging-time solve.

    ``t`` has one entry per input beam (zeros on collapsed duplicates and on
    every beam when infeasible). ``received`` is the useful banked energy
    per node. ``infeasible_nodes`` lists the node indices that triggered an
    infeasibility pre-check.
    """

    status: str  # "optimal" | "infeasible"
    t: np.ndarray
    objective: float | None = None
    received: np.ndarray | None = None
    infeasible_nodes: list[int] = field(default_factory=list)


def _dedup_rows(c: np.ndarray) -> list[int]:
    seen: dict[bytes, int] = {}
    keep: list[int] = []
    for i in range(c.shape[0]):
        key = c[i].tobytes()
        if key not in seen:
            seen[key] = i
            keep.append(i)
    return keep


def solve_charge_times(c_matrix: np.ndarray, e_b: np.ndarray, e_u: np.ndarray,
                       e_d: np.ndarray, p0: float, p_hov: float, *,
                       backend: str = "simplex",
                       lp_dump=None) -> ChargeTimeSolution:
    """Minimize hover-and-transmit loss for the beam family ``c_matrix``.

    ``c_matrix`` is (beams x nodes); ``backend`` selects the internal dense
    simplex or scipy's HiGHS (identical optima, different speed envelopes).
    ``lp_dump`` optionally writes the deduplicated program in LP text format.
    """
    c = np.asarray(c_matrix, dtype=float)
    if c.ndim != 2:
        c = np.atleast_2d(c)
    e_b = np.atleast_1d(np.asarray(e_b, dtype=float))
    e_u = np.atleast_1d(np.asarray(e_u, dtype=float))
    e_d = np.atleast_1d(np.asarray(e_d, dtype=float))
    k, n = c.shape
    if not (e_b.shape[0] == e_u.shape[0] == e_d.shape[0] == n):
        raise ValueError("energy vectors do not match the coefficient matrix")
    if p0 <= 0 or p_hov < 0:
        raise ValueError("transmit power must be positive, hover nonnegative")

    headroom = e_u - e_b
    over_cap = np.where(e_d > headroom + CAPACITY_TOL)[0]
    demand = e_d > DEMAND_EPS
    reach = c.max(axis=0) if k else np.zeros(n)
    unreachable = np.where(demand & (reach <= 0.0))[0]
    bad = sorted(set(over_cap.tolist()) | set(unreachable.tolist()))
    if bad:
        return ChargeTimeSolution(status="infeasible", t=np.zeros(k),
                                  infeasible_nodes=[int(i) for i in bad])

    keep = _dedup_rows(c)
    c_red = c[keep]
    kk = c_red.shape[0]
    obj = np.concatenate([np.full(kk, p0 + p_hov), -np.ones(n)])
    a_cov = np.hstack([-p0 * c_red.T, np.eye(n)])

    if lp_dump is not None:
        a_all = np.vstack([
            a_cov,
            np.hstack([np.zeros((n, kk)), np.eye(n)]),
            np.hstack([np.zeros((n, kk)), -np.eye(n)]),
        ])
        b_all = np.concatenate([np.zeros(n), headroom, -e_d])
        write_lp_text(LpProblem(obj, a_all, b_all), lp_dump)

    if backend == "simplex":
        a_all = np.vstack([
            a_cov,
            np.hstack([np.zeros((n, kk)), np.eye(n)]),
            np.hstack([np.zeros((n, kk)), -np.eye(n)]),
        ])
        b_all = np.concatenate([np.zeros(n), headroom, -e_d])
        sol = lp_solve(LpProblem(obj, a_all, b_all))
        if sol.status != "optimal":
            raise RuntimeError(
                f"charge-time program unexpectedly {sol.status} after pre-checks")
        x = sol.x
        objective = sol.objective
    elif backend == "highs":
        from scipy.optimize import linprog

        bounds = [(0.0, None)] * kk + [
            (float(e_d[i]), float(max(headroom[i], e_d[i]))) for i in range(n)
        ]
        res = linprog(obj, A_ub=a_cov, b_ub=np.zeros(n), bounds=bounds,
                      method="highs")
        if res.status == 2:
            raise RuntimeError(
                "charge-time program unexpectedly infeasible after pre-checks")
        if res.status != 0:
            raise RuntimeError(f"charge-time solve failed: {res.message}")
        x = np.asarray(res.x, dtype=float)
        objective = float(res.fun)
    else:
        raise ValueError(f"unknown backend {backend!r}")

    t = np.zeros(k)
    t[keep] = np.maximum(x[:kk], 0.0)
    received = np.clip(x[kk:], 0.0, None)
    return ChargeTimeSolution(status="optimal", t=t, objective=float(objective),
                              received=received)
