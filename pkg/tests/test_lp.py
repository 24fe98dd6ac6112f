"""Simplex solver tests: known optima, pathologies, and oracle agreement."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chargeplan.lp import LpProblem, lp_solve, write_lp_text
from chargeplan.oracles import enumerate_vertex_optimum


def solve(c, a, b, nonneg=None):
    return lp_solve(LpProblem(np.array(c, float), np.array(a, float),
                              np.array(b, float),
                              None if nonneg is None else np.array(nonneg)))


def test_simple_corner():
    # max x + y over the unit triangle x + y <= 1 with x capped at 0.5
    sol = solve([-1.0, -1.0], [[1, 1], [1, 0]], [1.0, 0.5])
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(-1.0, abs=1e-9)
    assert sol.x[0] + sol.x[1] == pytest.approx(1.0, abs=1e-9)


def test_unique_vertex():
    sol = solve([2.0, 3.0], [[-1, 0], [0, -1], [-1, -1]], [-1, -1, -3])
    assert sol.status == "optimal"
    # binding constraints: x >= 1, x + y >= 3 is dominated? No: feasible
    # region is x >= 1, y >= 1, x + y >= 3; cheapest is x = 2, y = 1.
    assert sol.x == pytest.approx([2.0, 1.0], abs=1e-8)
    assert sol.objective == pytest.approx(7.0, abs=1e-8)


def test_beale_cycling_instance():
    # the classical degenerate instance that cycles under naive pivoting
    c = [-0.75, 150.0, -0.02, 6.0]
    a = [[0.25, -60.0, -0.04, 9.0],
         [0.5, -90.0, -0.02, 3.0],
         [0.0, 0.0, 1.0, 0.0]]
    b = [0.0, 0.0, 1.0]
    sol = solve(c, a, b)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(-0.05, abs=1e-9)
    assert sol.x == pytest.approx([0.04, 0.0, 1.0, 0.0], abs=1e-8)


def test_infeasible():
    sol = solve([1.0], [[1.0]], [-1.0])  # x <= -1 with x >= 0
    assert sol.status == "infeasible"
    assert sol.x is None


def test_unbounded():
    sol = solve([-1.0, 0.0], [[0.0, 1.0]], [1.0])
    assert sol.status == "unbounded"


def test_free_variable_negative_optimum():
    # min x with x >= -5 and x otherwise free
    sol = solve([1.0], [[-1.0]], [5.0], nonneg=[False])
    assert sol.status == "optimal"
    assert sol.x[0] == pytest.approx(-5.0, abs=1e-9)
    assert sol.objective == pytest.approx(-5.0, abs=1e-9)


def test_free_variable_mixed():
    # y free, x >= 0: min x/2 - y  s.t. y <= 4, -x + y <= 1
    sol = solve([0.5, -1.0], [[0, 1], [-1, 1]], [4.0, 1.0],
                nonneg=[True, False])
    assert sol.status == "optimal"
    assert sol.x == pytest.approx([3.0, 4.0], abs=1e-8)
    assert sol.objective == pytest.approx(-2.5, abs=1e-8)


def test_free_variable_negative_part_active():
    # min y with y >= -2 alongside a nonneg x that stays at zero
    sol = solve([0.0, 1.0], [[0, -1], [1, 1]], [2.0, 1.0],
                nonneg=[True, False])
    assert sol.status == "optimal"
    assert sol.x == pytest.approx([0.0, -2.0], abs=1e-8)
    assert sol.objective == pytest.approx(-2.0, abs=1e-8)


def test_pinned_by_opposing_inequalities():
    # x <= 3 and x >= 3 pin the variable; second row exercises phase 1
    sol = solve([1.0, 1.0], [[1, 0], [-1, 0], [0, 1]], [3.0, -3.0, 10.0])
    assert sol.status == "optimal"
    assert sol.x[0] == pytest.approx(3.0, abs=1e-9)
    assert sol.x[1] == pytest.approx(0.0, abs=1e-12)


def test_redundant_flipped_rows_dropped():
    # duplicate >= rows force a redundant artificial row in phase 1
    sol = solve([1.0], [[-1.0], [-1.0], [-1.0]], [-2.0, -2.0, -2.0])
    assert sol.status == "optimal"
    assert sol.x[0] == pytest.approx(2.0, abs=1e-9)


def test_zero_objective_feasibility_only():
    sol = solve([0.0, 0.0], [[1, 1], [-1, -1]], [5.0, -5.0])
    assert sol.status == "optimal"
    assert sol.x[0] + sol.x[1] == pytest.approx(5.0, abs=1e-8)


def test_matches_vertex_enumeration_random():
    rng = np.random.default_rng(20240817)
    for _ in range(40):
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, 5))
        a = rng.normal(size=(m, n)).round(3)
        b = rng.uniform(0.5, 4.0, size=m).round(3)  # keeps x = 0 feasible
        c = rng.normal(size=n).round(3)
        # cap every variable so the region is bounded
        a_full = np.vstack([a, np.eye(n)])
        b_full = np.concatenate([b, np.full(n, 10.0)])
        sol = solve(c, a_full, b_full)
        oracle = enumerate_vertex_optimum(c, a_full, b_full)
        assert sol.status == "optimal"
        assert oracle is not None
        assert sol.objective == pytest.approx(oracle, abs=1e-7)
        assert np.all(a_full @ sol.x <= b_full + 1e-7)
        assert np.all(sol.x >= -1e-12)


def test_matches_vertex_enumeration_with_phase1():
    rng = np.random.default_rng(7)
    hit_infeasible = 0
    for _ in range(40):
        n = int(rng.integers(1, 4))
        m = int(rng.integers(1, 4))
        a = rng.normal(size=(m, n)).round(3)
        b = rng.normal(size=m).round(3)  # mixed signs: phase 1 territory
        c = rng.normal(size=n).round(3)
        a_full = np.vstack([a, np.eye(n)])
        b_full = np.concatenate([b, np.full(n, 10.0)])
        sol = solve(c, a_full, b_full)
        oracle = enumerate_vertex_optimum(c, a_full, b_full)
        if oracle is None:
            assert sol.status == "infeasible"
            hit_infeasible += 1
        else:
            assert sol.status == "optimal"
            assert sol.objective == pytest.approx(oracle, abs=1e-7)
    assert hit_infeasible > 0  # the draw must actually exercise both paths


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_feasible_and_no_better_vertex(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    m = int(rng.integers(1, 4))
    a = rng.normal(size=(m, n))
    b = rng.uniform(0.1, 3.0, size=m)
    c = rng.normal(size=n)
    a_full = np.vstack([a, np.eye(n)])
    b_full = np.concatenate([b, np.full(n, 8.0)])
    sol = solve(c, a_full, b_full)
    assert sol.status == "optimal"
    assert np.all(a_full @ sol.x <= b_full + 1e-7)
    oracle = enumerate_vertex_optimum(c, a_full, b_full)
    assert sol.objective <= oracle + 1e-7


def test_deterministic_repeat():
    rng = np.random.default_rng(99)
    a = rng.normal(size=(6, 4))
    b = rng.uniform(0.5, 2.0, size=6)
    c = rng.normal(size=4)
    first = solve(c, np.vstack([a, np.eye(4)]), np.concatenate([b, np.full(4, 5.0)]))
    second = solve(c, np.vstack([a, np.eye(4)]), np.concatenate([b, np.full(4, 5.0)]))
    assert first.x.tobytes() == second.x.tobytes()
    assert first.objective == second.objective


def test_input_validation():
    with pytest.raises(ValueError):
        LpProblem(np.ones(2), np.ones((1, 3)), np.ones(1))
    with pytest.raises(ValueError):
        LpProblem(np.ones(2), np.ones((2, 2)), np.ones(1))
    with pytest.raises(ValueError):
        LpProblem(np.ones(2), np.ones((1, 2)), np.ones(1), nonneg=np.ones(3, bool))


def test_lp_text_dump(tmp_path):
    prob = LpProblem(np.array([1.0, -2.0]), np.array([[1.0, 1.0], [0.0, -3.0]]),
                     np.array([4.0, -6.0]), nonneg=np.array([True, False]))
    out = tmp_path / "prob.lp"
    write_lp_text(prob, out)
    text = out.read_text()
    assert text.startswith("Minimize")
    assert "Subject To" in text and "Bounds" in text and text.rstrip().endswith("End")
    assert " c1: 1 x1 + 1 x2 <= 4" in text
    assert " c2: -3 x2 <= -6" in text
    assert " x1 >= 0" in text and " x2 free" in text
