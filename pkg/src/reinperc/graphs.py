"""Base graphs G (integer lattices, regular trees) and finite windows of G x Z.

Vertices of the product graph are pairs (base, h) where `base` identifies a
base-graph vertex and h is the integer height.  Lattice base vertices are
coordinate tuples; tree vertices are root paths (tuples of child labels:
0..degree-1 at the root, 0..degree-2 below it).  Distances are graph
distances: l1 for lattices, path distance for trees.

A Window(base_radius, height) restricts the product graph to
B_G(base_radius) x [-height, height] with free boundary conditions: edges
leaving the window simply do not exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

LATTICE = "lattice"
TREE = "tree"


@dataclass(frozen=True)
class GraphSpec:
    """A quasi-transitive base graph: Z^parameter or the parameter-regular tree."""

    kind: str
    parameter: int

    def __post_init__(self):
        if self.kind == LATTICE:
            if self.parameter < 1:
                raise ValueError("lattice base dimension must be >= 1")
        elif self.kind == TREE:
            if not 3 <= self.parameter <= 255:
                raise ValueError("tree degree must be in [3, 255]")
        else:
            raise ValueError(f"unknown graph kind {self.kind!r}")

    @property
    def origin(self):
        return (0,) * self.parameter if self.kind == LATTICE else ()

    @property
    def max_degree(self) -> int:
        return 2 * self.parameter if self.kind == LATTICE else self.parameter


def integer_lattice(dimension: int) -> GraphSpec:
    """Base graph Z^dimension (the product graph is then Z^(dimension+1))."""
    return GraphSpec(LATTICE, dimension)


def regular_tree(degree: int) -> GraphSpec:
    return GraphSpec(TREE, degree)


@dataclass(frozen=True)
class Window:
    base_radius: int
    height: int

    def __post_init__(self):
        if self.base_radius < 0 or self.height < 0:
            raise ValueError("window extents must be nonnegative")


@dataclass(frozen=True)
class Box:
    """B^x(a, r): base ball of radius r around x, heights [a-r, a+r]."""

    center_base: tuple
    center_height: int
    radius: int

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("box radius must be nonnegative")


# ---------------------------------------------------------------- base graph

@lru_cache(maxsize=None)
def ball_count(spec: GraphSpec, r: int) -> int:
    """|B_G(r)|, exact.

    Lattice Z^k: sum_i 2^i C(k,i) C(r,i)  (choose i active axes, signs, and a
    composition of the radius).  Tree of degree D: 1 + D((D-1)^r - 1)/(D-2).
    """
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if spec.kind == LATTICE:
        k = spec.parameter
        return sum(
            (1 << i) * math.comb(k, i) * math.comb(r, i)
            for i in range(0, min(k, r) + 1)
        )
    d = spec.parameter
    if r == 0:
        return 1
    return 1 + d * ((d - 1) ** r - 1) // (d - 2)


def base_distance(spec: GraphSpec, u: tuple, v: tuple) -> int:
    if spec.kind == LATTICE:
        return sum(abs(a - b) for a, b in zip(u, v))
    m = 0
    for a, b in zip(u, v):
        if a != b:
            break
        m += 1
    return len(u) + len(v) - 2 * m


def base_neighbors(spec: GraphSpec, v: tuple) -> list:
    if spec.kind == LATTICE:
        out = []
        for i in range(spec.parameter):
            for step in (1, -1):
                out.append(v[:i] + (v[i] + step,) + v[i + 1:])
        return out
    d = spec.parameter
    if not v:
        return [(c,) for c in range(d)]
    return [v[:-1]] + [v + (c,) for c in range(d - 1)]


@lru_cache(maxsize=64)
def base_ball_vertices(spec: GraphSpec, r: int) -> tuple:
    """Vertices of B_G(0, r) in canonical order (sorted by distance, then id)."""
    if spec.kind == LATTICE:
        k = spec.parameter
        verts = []

        def rec(prefix, budget):
            if len(prefix) == k - 1:
                for x in range(-budget, budget + 1):
                    verts.append(prefix + (x,))
                return
            for x in range(-budget, budget + 1):
                rec(prefix + (x,), budget - abs(x))

        rec((), r)
        verts.sort()
        return tuple(verts)
    level = [()]
    out = [()]
    d = spec.parameter
    for depth in range(r):
        nxt = []
        for path in level:
            labels = range(d) if depth == 0 else range(d - 1)
            nxt.extend(path + (c,) for c in labels)
        out.extend(nxt)
        level = nxt
    return tuple(out)


@lru_cache(maxsize=None)
def base_edge_count(spec: GraphSpec, r: int) -> int:
    """Number of base-graph edges with both endpoints in B_G(r), exact."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if spec.kind == TREE:
        return ball_count(spec, r) - 1
    k = spec.parameter
    if k == 1:
        return 2 * r
    # Per axis, each line segment through a transverse point at distance s
    # carries 2(r-s) edges; sum over the (k-1)-dimensional shells.
    sub = GraphSpec(LATTICE, k - 1)
    total = 0
    for s in range(r + 1):
        shell = ball_count(sub, s) - (ball_count(sub, s - 1) if s else 0)
        total += shell * 2 * (r - s)
    return k * total


def count_box_edges(spec: GraphSpec, base_radius: int, half_height: int) -> int:
    """Edges of the product graph inside B_G(base_radius) x [-hh, hh], exact."""
    if base_radius < 0 or half_height < 0:
        raise ValueError("arguments must be nonnegative")
    layers = 2 * half_height + 1
    bc = ball_count(spec, base_radius)
    return base_edge_count(spec, base_radius) * layers + bc * (layers - 1)


@lru_cache(maxsize=None)
def growth_constant(spec: GraphSpec) -> float:
    """Smallest practical c_G with ball_count(r) <= exp(c_G * r) for all r >= 1.

    Computed as the max of log(ball_count(r))/r over an initial segment, with
    the segment extended until an analytic envelope certifies the tail:
      tree:     ball_count(r) <= (D+1)(D-1)^r, so the ratio tends to log(D-1);
      lattice:  ball_count(r) <= (2r+1)^k, ratio k*log(2r+1)/r, decreasing.
    """
    R = 64
    while True:
        cand = max(math.log(ball_count(spec, r)) / r for r in range(1, R + 1))
        if spec.kind == TREE:
            d = spec.parameter
            tail = math.log(d + 1) / R + math.log(d - 1)
        else:
            k = spec.parameter
            tail = k * math.log(2 * R + 1) / R
        if tail <= cand:
            return cand
        R *= 2


# ------------------------------------------------------------------- windows

def vertex_in_window(spec: GraphSpec, w: Window, v) -> bool:
    base, h = v
    return abs(h) <= w.height and base_distance(spec, spec.origin, base) <= w.base_radius


def on_window_boundary(spec: GraphSpec, w: Window, v) -> bool:
    base, h = v
    return (
        abs(h) == w.height
        or base_distance(spec, spec.origin, base) == w.base_radius
    )


def neighbors(spec: GraphSpec, w: Window, v) -> list:
    """Product-graph neighbors of v that lie inside the window."""
    if not vertex_in_window(spec, w, v):
        raise ValueError(f"vertex {v!r} is outside the window")
    base, h = v
    out = []
    for nb in base_neighbors(spec, base):
        if base_distance(spec, spec.origin, nb) <= w.base_radius:
            out.append((nb, h))
    if h + 1 <= w.height:
        out.append((base, h + 1))
    if h - 1 >= -w.height:
        out.append((base, h - 1))
    return out


def box_vertices(spec: GraphSpec, w: Window, b: Box) -> set:
    """Vertices of the box clipped to the window.

    Enumerates a base ball around the box center by BFS; intended for tests
    and small boxes, not for hot paths (regions use height profiles instead).
    """
    lo = max(b.center_height - b.radius, -w.height)
    hi = min(b.center_height + b.radius, w.height)
    if lo > hi:
        return set()
    frontier = [b.center_base]
    seen = {b.center_base}
    ball = []
    for _ in range(b.radius + 1):
        nxt = []
        for u in frontier:
            if base_distance(spec, spec.origin, u) <= w.base_radius:
                ball.append(u)
            for nb in base_neighbors(spec, u):
                if nb not in seen:
                    seen.add(nb)
                    nxt.append(nb)
        frontier = nxt
    return {(u, h) for u in ball for h in range(lo, hi + 1)}


def vertex_in_box(spec: GraphSpec, b: Box, v) -> bool:
    base, h = v
    return (
        abs(h - b.center_height) <= b.radius
        and base_distance(spec, b.center_base, base) <= b.radius
    )
