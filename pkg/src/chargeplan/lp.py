"""Dense two-phase simplex for small linear programs.

Problems are canonical-form minimizations

    min c.x   s.t.   A x <= b,   x_j >= 0 for flagged j (free otherwise)

Free variables are split into positive parts internally. Phase 1 drives
artificial variables out of rows whose right-hand side had to be flipped;
phase 2 optimizes the real objective. Pivoting is deterministic: entering by
most-negative reduced cost with smallest-index ties, leaving by minimum
ratio with smallest-basis-index ties, and a switch to Bland's smallest-index
entering rule after a run of degenerate pivots, which rules out cycling.
The final vertex is re-solved from the original basis columns so the
reported point does not carry accumulated pivot rounding.

The solver targets the small charge-time programs of this package; the
batch harness prefers the sparse HiGHS backend for its larger instances.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

PIVOT_TOL = 1e-9


@dataclass
class LpProblem:
    """min c.x subject to a_ub x <= b_ub and nonneg-flagged x >= 0."""

    c: np.ndarray
    a_ub: np.ndarray
    b_ub: np.ndarray
    nonneg: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.atleast_1d(np.asarray(self.c, dtype=float))
        self.a_ub = np.asarray(self.a_ub, dtype=float)
        if self.a_ub.ndim != 2:
            self.a_ub = np.atleast_2d(self.a_ub)
        self.b_ub = np.atleast_1d(np.asarray(self.b_ub, dtype=float))
        n = self.c.shape[0]
        if self.a_ub.shape[1] != n:
            raise ValueError("constraint matrix width does not match objective")
        if self.a_ub.shape[0] != self.b_ub.shape[0]:
            raise ValueError("constraint rows do not match bounds")
        if self.nonneg is None:
            self.nonneg = np.ones(n, dtype=bool)
        else:
            self.nonneg = np.atleast_1d(np.asarray(self.nonneg, dtype=bool))
            if self.nonneg.shape[0] != n:
                raise ValueError("nonneg flags do not match objective")


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None = None
    objective: float | None = None


def _pivot(tab: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    factors = tab[:, col].copy()
    factors[row] = 0.0
    tab -= np.outer(factors, tab[row])
    basis[row] = col


def _run_simplex(tab: np.ndarray, basis: np.ndarray, width: int,
                 *, max_iter: int) -> str:
    """Minimize the last tableau row over columns [0, width). In place."""
    m = tab.shape[0] - 1
    bland_after = 2 * (m + width) + 10
    degenerate_run = 0
    bland = False
    for _ in range(max_iter):
        red = tab[-1, :width]
        if bland:
            negs = np.where(red < -PIVOT_TOL)[0]
            if negs.size == 0:
                return "optimal"
            col = int(negs[0])
        else:
            col = int(np.argmin(red))
            if red[col] >= -PIVOT_TOL:
                return "optimal"
        colvals = tab[:m, col]
        rhs = tab[:m, -1]
        pos = colvals > PIVOT_TOL
        if not np.any(pos):
            return "unbounded"
        ratios = np.full(m, np.inf)
        ratios[pos] = rhs[pos] / colvals[pos]
        best = float(np.min(ratios))
        ties = np.where(ratios <= best + 1e-12)[0]
        row = int(ties[np.argmin(basis[ties])])
        if best <= PIVOT_TOL:
            degenerate_run += 1
            if degenerate_run >= bland_after:
                bland = True
        else:
            degenerate_run = 0
            bland = False
        _pivot(tab, basis, row, col)
    raise RuntimeError("simplex iteration limit exceeded")


def lp_solve(problem: LpProblem, *, max_iter: int | None = None) -> LpSolution:
    """Solve the canonical-form program; deterministic for identical input."""
    n_orig = problem.c.shape[0]
    split_cols = np.where(~problem.nonneg)[0]
    a = problem.a_ub
    c = problem.c
    if split_cols.size:
        a = np.hstack([a, -a[:, split_cols]])
        c = np.concatenate([c, -c[split_cols]])
    m, n = a.shape

    # equality form with slacks; flip negative-rhs rows and give them artificials
    b = problem.b_ub.copy()
    eq = np.hstack([a, np.eye(m)])
    flip = b < 0
    eq[flip] *= -1.0
    b[flip] *= -1.0
    art_rows = np.where(flip)[0]
    n_art = int(art_rows.size)
    width_real = n + m
    if max_iter is None:
        max_iter = 2000 + 40 * (m + n)

    basis = np.arange(n, n + m)
    if n_art:
        art_block = np.zeros((m, n_art))
        for k, r in enumerate(art_rows):
            art_block[r, k] = 1.0
            basis[r] = width_real + k
        tab = np.zeros((m + 1, width_real + n_art + 1))
        tab[:m, :width_real] = eq
        tab[:m, width_real:-1] = art_block
        tab[:m, -1] = b
        tab[-1, width_real:-1] = 1.0
        for r in art_rows:
            tab[-1] -= tab[r]
        status = _run_simplex(tab, basis, width_real + n_art, max_iter=max_iter)
        if status != "optimal":
            raise RuntimeError("phase 1 cannot be unbounded")
        if -tab[-1, -1] > 1e-7:
            return LpSolution(status="infeasible")
        row_ids = list(range(m))
        dropped = []
        for r in range(m):
            if basis[r] < width_real:
                continue
            nz = np.where(np.abs(tab[r, :width_real]) > 1e-7)[0]
            if nz.size:
                _pivot(tab, basis, r, int(nz[0]))
            else:
                dropped.append(r)
        if dropped:
            keep = [r for r in range(m) if r not in dropped]
            tab = np.vstack([tab[keep], tab[-1][None, :]])
            basis = basis[keep]
            row_ids = [row_ids[r] for r in keep]
            m = len(keep)
        tab = np.hstack([tab[:, :width_real], tab[:, -1][:, None]])
    else:
        row_ids = list(range(m))
        tab = np.zeros((m + 1, width_real + 1))
        tab[:m, :width_real] = eq
        tab[:m, -1] = b

    ext_c = np.concatenate([c, np.zeros(width_real - n)])
    tab[-1, :] = 0.0
    tab[-1, :-1] = ext_c
    for r in range(m):
        cost = ext_c[basis[r]]
        if cost != 0.0:
            tab[-1] -= cost * tab[r]

    status = _run_simplex(tab, basis, width_real, max_iter=max_iter)
    if status == "unbounded":
        return LpSolution(status="unbounded")

    x_ext = np.zeros(width_real)
    x_ext[basis] = tab[:m, -1]
    # refine the vertex against the surviving original equalities
    bmat = eq[np.ix_(row_ids, basis)]
    try:
        refined = np.linalg.solve(bmat, b[row_ids])
        residual = bmat @ refined - b[row_ids]
        if (np.all(np.isfinite(refined)) and np.max(np.abs(residual)) < 1e-6
                and np.min(refined) > -1e-7):
            x_ext[:] = 0.0
            x_ext[basis] = refined
    except np.linalg.LinAlgError:
        pass
    x_ext = np.where(np.abs(x_ext) < 1e-11, 0.0, np.maximum(x_ext, 0.0))

    x = x_ext[:n_orig].copy()
    for k, j in enumerate(split_cols):
        x[j] = x_ext[j] - x_ext[n_orig + k]
    return LpSolution(status="optimal", x=x, objective=float(problem.c @ x))


def write_lp_text(problem: LpProblem, path) -> None:
    """Dump the program in the plain LP text exchange format."""
    lines = ["Minimize"]

    def term_str(coef, j, lead):
        mag = f"{abs(coef):.17g} x{j + 1}"
        if lead:
            return f"{'-' if coef < 0 else ''}{mag}"
        return f"{'-' if coef < 0 else '+'} {mag}"

    terms = [term_str(float(cj), j, j == 0) for j, cj in enumerate(problem.c)]
    lines.append(" obj: " + " ".join(terms))
    lines.append("Subject To")
    for i in range(problem.a_ub.shape[0]):
        row = problem.a_ub[i]
        nz = np.where(row != 0)[0]
        if nz.size == 0:
            continue
        terms = [term_str(float(row[j]), int(j), k == 0) for k, j in enumerate(nz)]
        lines.append(f" c{i + 1}: " + " ".join(terms) + f" <= {float(problem.b_ub[i]):.17g}")
    lines.append("Bounds")
    for j in range(problem.c.shape[0]):
        lines.append(f" x{j + 1} >= 0" if problem.nonneg[j] else f" x{j + 1} free")
    lines.append("End")
    Path(path).write_text("\n".join(lines) + "\n")
