"""Comparison-strategy generators: positions, beam fans, ant-colony tours."""
import math

import numpy as np
import pytest

from chargeplan.baselines import (AcoParams, MethodChoice, aco_tour,
                                  generate_directions_baseline,
                                  generate_positions, min_enclosing_sphere,
                                  polyhedron_directions, tour_baseline)
from chargeplan.directions import coverage_mask, synthesize_directions
from chargeplan.tour import greedy_tour, improve_tour

H = math.pi / 6.0
D = 6.0


# ------------------------------------------------------------- positions


def test_node_positions_are_the_nodes():
    nodes = np.array([[1.0, 2, 3], [4, 5, 6]])
    out = generate_positions(nodes, "node", D)
    assert np.array_equal(out, nodes)
    assert out is not nodes


def test_group_two_close_nodes_share_midpoint():
    nodes = np.array([[0.0, 0, 0], [1.0, 0, 0]])
    out = generate_positions(nodes, "group", D)
    assert out.shape == (1, 3)
    assert np.allclose(out[0], [0.5, 0, 0], atol=1e-9)


def test_group_far_nodes_split():
    nodes = np.array([[0.0, 0, 0], [100.0, 0, 0]])
    out = generate_positions(nodes, "group", D)
    assert out.shape == (2, 3)


def test_cluster_every_node_within_reach():
    rng = np.random.default_rng(123)
    nodes = rng.uniform([0, 0, 0], [40, 40, 10], size=(50, 3))
    centers = generate_positions(nodes, "cluster", D)
    d = np.linalg.norm(nodes[:, None, :] - centers[None, :, :], axis=2)
    assert np.all(d.min(axis=1) <= D + 1e-9)
    assert centers.shape[0] <= 50


def test_grid_lattice_covers_and_is_pruned():
    rng = np.random.default_rng(5)
    nodes = rng.uniform([0, 0, 0], [30, 30, 8], size=(25, 3))
    pts = generate_positions(nodes, "grid", D)
    d = np.linalg.norm(pts[:, None, :] - nodes[None, :, :], axis=2)
    # kept cells must reach a node, and every node must be reachable
    assert np.all(d.min(axis=1) <= D)
    assert np.all(d.min(axis=0) <= D)


def test_grid_spacing_validation():
    with pytest.raises(ValueError):
        generate_positions(np.zeros((1, 3)), "grid", D, grid_spacing=0.0)
    with pytest.raises(ValueError):
        generate_positions(np.zeros((1, 3)), "bogus", D)


def test_empty_input():
    assert generate_positions(np.zeros((0, 3)), "group", D).shape[0] == 0


# ------------------------------------------------- minimum enclosing sphere


def test_mes_two_points():
    c, r = min_enclosing_sphere(np.array([[0.0, 0, 0], [2.0, 0, 0]]))
    assert np.allclose(c, [1, 0, 0], atol=1e-9)
    assert r == pytest.approx(1.0, abs=1e-9)


def test_mes_equilateral_triangle():
    s = 2.0
    pts = np.array([[0.0, 0, 0], [s, 0, 0], [s / 2, s * math.sqrt(3) / 2, 0]])
    c, r = min_enclosing_sphere(pts)
    assert r == pytest.approx(s / math.sqrt(3), abs=1e-9)
    assert np.allclose(c, pts.mean(axis=0), atol=1e-9)


def test_mes_regular_tetrahedron():
    pts = np.array([[1.0, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]])
    c, r = min_enclosing_sphere(pts)
    assert np.allclose(c, [0, 0, 0], atol=1e-9)
    assert r == pytest.approx(math.sqrt(3), abs=1e-9)


def test_mes_contains_all_and_interior_points_ignored():
    rng = np.random.default_rng(17)
    for _ in range(10):
        pts = rng.uniform(-5, 5, size=(int(rng.integers(2, 40)), 3))
        c, r = min_enclosing_sphere(pts)
        d = np.linalg.norm(pts - c, axis=1)
        assert np.all(d <= r + 1e-7)
        assert r >= 0.5 * np.max(
            np.linalg.norm(pts[:, None] - pts[None, :], axis=2)) - 1e-7
        with_center = np.vstack([pts, c[None, :]])  # interior point
        c2, r2 = min_enclosing_sphere(with_center)
        assert r2 == pytest.approx(r, abs=1e-7)


# ------------------------------------------------------------- directions


def test_dir_node_single():
    nodes = np.array([[3.0, 0.0, 0.0]])
    pairs = generate_directions_baseline(np.zeros((1, 3)), nodes, "node", H, D)
    assert len(pairs) == 1
    assert np.allclose(pairs[0].direction, [1, 0, 0], atol=1e-12)
    assert pairs[0].covered == frozenset({0})


def test_polyhedron_direction_counts():
    ico = polyhedron_directions("icosahedron")
    assert ico.shape == (20, 3)
    soccer = polyhedron_directions("soccer")
    assert soccer.shape == (32, 3)
    for dirs in (ico, soccer):
        assert np.allclose(np.linalg.norm(dirs, axis=1), 1.0, atol=1e-12)
        assert len({tuple(np.round(d, 12)) for d in dirs}) == dirs.shape[0]
    with pytest.raises(ValueError):
        polyhedron_directions("cube")


def test_polyhedron_pairs_prune_empty_coverage():
    nodes = np.array([[0.0, 0.0, 3.0]])  # straight above the position
    pairs = generate_directions_baseline(np.zeros((1, 3)), nodes,
                                         "polyhedron", H, D)
    assert 1 <= len(pairs) < 20
    assert all(p.covered == frozenset({0}) for p in pairs)


def test_gcc_covers_every_synthesized_set():
    rng = np.random.default_rng(31)
    for _ in range(6):
        nodes = rng.uniform([0, 0, 0], [14, 14, 6], size=(12, 3))
        positions = nodes  # node-based placement
        synth = synthesize_directions(nodes, positions, H, D)
        gcc = generate_directions_baseline(positions, nodes, "gcc", H, D)
        by_pos = {}
        for p in gcc:
            by_pos.setdefault(p.position_index, []).append(p.covered)
        for p in synth:
            assert any(p.covered <= cov for cov in by_pos.get(p.position_index, [])), \
                "a synthesized covered set is not dominated by the tangent fan"


def test_gcc_has_at_least_the_axis_beams():
    rng = np.random.default_rng(9)
    nodes = rng.uniform([0, 0, 0], [10, 10, 5], size=(8, 3))
    gcc = generate_directions_baseline(nodes[:1], nodes, "gcc", H, D)
    in_reach = np.linalg.norm(nodes - nodes[0], axis=1) <= D
    assert len(gcc) >= max(int(in_reach.sum()) - 1, 1)


def test_acc_merges_two_mergeable_beams():
    # two rays 50 degrees apart: no axis covers both, a tangent beam does
    a = math.radians(50.0)
    nodes = np.array([[2.0, 0.0, 0.0],
                      [2.0 * math.cos(a), 2.0 * math.sin(a), 0.0]])
    gcc = generate_directions_baseline(np.zeros((1, 3)), nodes, "gcc", H, D)
    assert len(gcc) == 4  # two axes plus two shared-tangent beams
    acc = generate_directions_baseline(np.zeros((1, 3)), nodes, "acc", H, D)
    assert len(acc) == 1
    assert acc[0].covered == frozenset({0, 1})


def test_acc_keeps_unmergeable_beams():
    nodes = np.array([[2.0, 0, 0], [-2.0, 0, 0]])  # antipodal rays
    acc = generate_directions_baseline(np.zeros((1, 3)), nodes, "acc", H, D)
    assert len(acc) == 2


def test_acc_preserves_total_coverage():
    rng = np.random.default_rng(63)
    nodes = rng.uniform([0, 0, 0], [12, 12, 6], size=(10, 3))
    gcc = generate_directions_baseline(nodes, nodes, "gcc", H, D)
    acc = generate_directions_baseline(nodes, nodes, "acc", H, D)
    assert len(acc) <= len(gcc)
    gcc_cov = frozenset().union(*(p.covered for p in gcc))
    acc_cov = frozenset().union(*(p.covered for p in acc))
    assert acc_cov == gcc_cov


def test_direction_method_validation():
    with pytest.raises(ValueError):
        generate_directions_baseline(np.zeros((1, 3)), np.zeros((1, 3)),
                                     "mystery", H, D)


def test_exact_covered_sets_match_mask():
    rng = np.random.default_rng(4)
    nodes = rng.uniform([0, 0, 0], [10, 10, 5], size=(9, 3))
    for method in ("node", "gcc", "acc", "polyhedron"):
        for p in generate_directions_baseline(nodes[:3], nodes, method, H, D):
            delta = nodes - p.position
            dist = np.linalg.norm(delta, axis=1)
            sel = (dist <= D) & (dist >= 1e-9)
            units = delta[sel] / dist[sel, None]
            ids = np.where(sel)[0]
            expect = frozenset(int(i) for i in ids[coverage_mask(units, p.direction, H)])
            expect |= frozenset(int(i) for i in np.where(dist < 1e-9)[0])
            assert p.covered == expect


# ------------------------------------------------------------------ tours


def test_aco_square_hits_perimeter():
    pts = np.array([[0, 0, 0], [0, 1, 0], [1, 1, 0], [1, 0, 0]], dtype=float)
    tour = aco_tour(pts, np.zeros(3), seed=3)
    assert tour.length == pytest.approx(4.0, abs=1e-9)


def test_aco_seeded_determinism():
    rng = np.random.default_rng(10)
    pts = rng.uniform(0, 10, size=(9, 3))
    a = aco_tour(pts, np.zeros(3), seed=5)
    b = aco_tour(pts, np.zeros(3), seed=5)
    assert a.order == b.order and a.length == b.length


def test_aco_never_absurd():
    rng = np.random.default_rng(2)
    pts = rng.uniform(0, 10, size=(12, 3))
    tour = aco_tour(pts, np.zeros(3), seed=1,
                    params=AcoParams(ants=10, iterations=60))
    assert sorted(tour.order) == list(range(12))
    assert tour.length <= greedy_tour(pts, np.zeros(3)).length + 1e-9


def test_tour_baseline_dispatch():
    pts = np.array([[1.0, 0, 0], [2.0, 0, 0], [3.0, 0, 0]])
    base = np.zeros(3)
    assert tour_baseline(pts, base, "greedy").order == [0, 1, 2]
    assert tour_baseline(pts, base, "lkh_style").length == pytest.approx(
        improve_tour(pts, base).length)
    assert tour_baseline(pts, base, "aco", seed=0).length == pytest.approx(
        6.0, abs=1e-9)
    with pytest.raises(ValueError):
        tour_baseline(pts, base, "dijkstra")


def test_aco_params_validation():
    with pytest.raises(ValueError):
        AcoParams(ants=0)
    with pytest.raises(ValueError):
        AcoParams(rho=1.5)


# ------------------------------------------------------------- composites


def test_method_choice_parse_and_label():
    mc = MethodChoice.parse("grid:acc:greedy")
    assert mc.position_method == "grid"
    assert mc.direction_method == "acc"
    assert mc.tour_method == "greedy"
    assert mc.label == "grid:acc:greedy"
    assert MethodChoice().label == "node:funceqv:lkh_style"
    with pytest.raises(ValueError):
        MethodChoice.parse("grid:acc")
    with pytest.raises(ValueError):
        MethodChoice.parse("grid:acc:warp")
