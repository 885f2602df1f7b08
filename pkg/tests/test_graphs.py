"""Base graphs, windows, and exact counting formulas."""

import math

import numpy as np
import pytest

from reinperc.graphs import (
    Box,
    GraphSpec,
    Window,
    ball_count,
    base_ball_vertices,
    base_distance,
    base_edge_count,
    base_neighbors,
    box_vertices,
    count_box_edges,
    growth_constant,
    integer_lattice,
    neighbors,
    on_window_boundary,
    regular_tree,
    vertex_in_box,
    vertex_in_window,
)
from reinperc.windows import window_graph

Z1 = integer_lattice(1)
Z2 = integer_lattice(2)
Z3 = integer_lattice(3)
T3 = regular_tree(3)
T4 = regular_tree(4)


def test_spec_validation():
    with pytest.raises(ValueError):
        integer_lattice(0)
    with pytest.raises(ValueError):
        regular_tree(2)
    with pytest.raises(ValueError):
        GraphSpec("hex", 3)
    assert Z2.origin == (0, 0)
    assert T3.origin == ()
    assert Z2.max_degree == 4
    assert T3.max_degree == 3


def test_window_validation():
    with pytest.raises(ValueError):
        Window(-1, 4)
    with pytest.raises(ValueError):
        Window(4, -1)
    with pytest.raises(ValueError):
        Box((0,), 0, -1)


@pytest.mark.parametrize("spec,values", [
    (Z1, [1, 3, 5, 7, 9]),
    (Z2, [1, 5, 13, 25, 41]),
    (Z3, [1, 7, 25, 63, 129]),
    (T3, [1, 4, 10, 22, 46]),
    (T4, [1, 5, 17, 53, 161]),
])
def test_ball_count_values(spec, values):
    assert [ball_count(spec, r) for r in range(5)] == values


@pytest.mark.parametrize("spec", [Z1, Z2, Z3, T3, T4])
def test_ball_count_matches_enumeration(spec):
    # the closed formula against the recursive vertex listing
    for r in range(6):
        verts = base_ball_vertices(spec, r)
        assert len(verts) == ball_count(spec, r)
        assert len(set(verts)) == len(verts)
        assert all(base_distance(spec, spec.origin, v) <= r for v in verts)


@pytest.mark.parametrize("spec", [Z1, Z2, T3, T4])
def test_neighbors_are_at_distance_one(spec):
    for v in base_ball_vertices(spec, 3):
        nbs = base_neighbors(spec, v)
        assert len(nbs) == spec.max_degree
        assert len(set(nbs)) == len(nbs)
        for nb in nbs:
            assert base_distance(spec, v, nb) == 1


def test_tree_distance_examples():
    assert base_distance(T3, (0,), (1,)) == 2
    assert base_distance(T3, (0, 0), (0,)) == 1
    assert base_distance(T3, (0, 0), (1, 0)) == 4
    assert base_distance(T3, (), (2, 1, 0)) == 3


@pytest.mark.parametrize("spec", [Z1, Z2, Z3, T3])
def test_base_edge_count_vs_brute_force(spec):
    for r in range(5):
        verts = base_ball_vertices(spec, r)
        inside = set(verts)
        brute = sum(
            1
            for v in verts
            for nb in base_neighbors(spec, v)
            if nb in inside
        ) // 2
        assert base_edge_count(spec, r) == brute


def test_count_box_edges_spot_value():
    # 3 wide x 3 tall on the Z x Z product: 6 horizontal + 6 vertical
    assert count_box_edges(Z1, 1, 1) == 12


@pytest.mark.parametrize("spec,rho,H", [
    (Z1, 3, 4), (Z2, 2, 3), (T3, 2, 2), (Z3, 1, 2),
])
def test_count_box_edges_matches_window_graph(spec, rho, H):
    wg = window_graph(spec, Window(rho, H))
    assert count_box_edges(spec, rho, H) == wg.n_edges


@pytest.mark.parametrize("spec", [Z1, Z2, Z3, T3, T4])
def test_growth_constant_dominates(spec):
    cg = growth_constant(spec)
    for r in range(1, 81):
        assert math.log(ball_count(spec, r)) <= cg * r * (1 + 1e-12)


def test_growth_constant_known_values():
    # sup_r log|B(r)|/r is attained at r=1 for these graphs
    assert growth_constant(Z1) == pytest.approx(math.log(3))
    assert growth_constant(T3) == pytest.approx(math.log(4))


def test_window_membership_and_boundary():
    w = Window(2, 3)
    assert vertex_in_window(Z2, w, ((1, 1), -3))
    assert not vertex_in_window(Z2, w, ((2, 1), 0))
    assert on_window_boundary(Z2, w, ((0, 0), 3))
    assert on_window_boundary(Z2, w, ((2, 0), 1))
    assert not on_window_boundary(Z2, w, ((1, 0), 2))


def test_neighbors_respect_window():
    w = Window(2, 3)
    nbs = neighbors(Z2, w, ((0, 0), 0))
    assert len(nbs) == 6
    corner = neighbors(Z2, w, ((2, 0), 3))
    assert all(vertex_in_window(Z2, w, v) for v in corner)
    assert ((2, 0), 4) not in corner
    with pytest.raises(ValueError):
        neighbors(Z2, w, ((3, 0), 0))


@pytest.mark.parametrize("spec", [Z2, T3])
def test_box_vertices_agree_with_membership(spec):
    w = Window(3, 4)
    b = Box(spec.origin, 2, 2)
    got = box_vertices(spec, w, b)
    expect = {
        (v, h)
        for v in base_ball_vertices(spec, 3)
        for h in range(-4, 5)
        if vertex_in_box(spec, b, (v, h))
    }
    assert got == expect


def test_box_vertices_clipped_to_window():
    w = Window(2, 3)
    b = Box((0,), 3, 2)  # heights 1..5, window stops at 3
    got = box_vertices(Z1, w, b)
    assert {h for _, h in got} == {1, 2, 3}
