"""Indexed window graphs: flat arrays for vertices, edges, and boundaries.

WindowGraph freezes one window of G x Z into numpy arrays with a canonical
vertex and edge order so that bond sampling, union-find and exploration all
agree on indices.  Edge order follows (min endpoint height, base vertex,
direction): all edges at the bottom height first, vertical before horizontal
at equal (height, base).

Every vertex also gets a stable 64-bit identity hashed from its coordinates
(not from its window index), so the same physical edge receives the same
bond uniform in every window that contains it.  That is what makes estimates
on nested windows couple monotonically.
"""

from __future__ import annotations

import hashlib
from functools import lru_cache

import numpy as np

from .graphs import (
    LATTICE,
    GraphSpec,
    Window,
    base_ball_vertices,
    base_neighbors,
    base_distance,
)
from .rng import mix64_array, token_key

_VERTEX_TAG = token_key("product-vertex")
_EDGE_TAG = token_key("product-edge")


def _base_vertex_bytes(spec: GraphSpec, v: tuple) -> bytes:
    if spec.kind == LATTICE:
        return b"L" + b"".join(int(c).to_bytes(4, "little", signed=True) for c in v)
    return b"T" + bytes(v)


def _base_vertex_id(spec: GraphSpec, v: tuple) -> int:
    digest = hashlib.blake2b(_base_vertex_bytes(spec, v), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class WindowGraph:
    """Immutable indexed representation of one window of G x Z."""

    def __init__(self, spec: GraphSpec, window: Window):
        self.spec = spec
        self.window = window
        H, rho = window.height, window.base_radius
        self.n_heights = 2 * H + 1

        base = base_ball_vertices(spec, rho)
        self.base_vertices = base
        self.n_base = len(base)
        self.base_index = {v: i for i, v in enumerate(base)}
        self.base_dist = np.array(
            [base_distance(spec, spec.origin, v) for v in base], dtype=np.int64
        )
        self._base_ids = np.array(
            [_base_vertex_id(spec, v) for v in base], dtype=np.uint64
        )

        self.n_vertices = self.n_base * self.n_heights
        self.vertex_base = np.repeat(
            np.arange(self.n_base, dtype=np.int64), self.n_heights
        )
        self.vertex_height = np.tile(
            np.arange(-H, H + 1, dtype=np.int64), self.n_base
        )
        self.vertex_dist = self.base_dist[self.vertex_base]
        self.origin_index = self.base_index[spec.origin] * self.n_heights + H

        zz = np.where(
            self.vertex_height < 0,
            (self.vertex_height << 1) ^ (self.vertex_height >> 63),
            self.vertex_height << 1,
        ).astype(np.uint64)
        self.vertex_ids = mix64_array(
            self._base_ids[self.vertex_base]
            ^ mix64_array(zz ^ np.uint64(_VERTEX_TAG))
        )

        # base-graph edges inside the ball, as (rank_lo, rank_hi) with lo < hi
        pairs = set()
        for i, v in enumerate(base):
            for nb in base_neighbors(spec, v):
                j = self.base_index.get(nb)
                if j is not None and j != i:
                    pairs.add((i, j) if i < j else (j, i))
        self.base_edges = np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)

        eu, ev, key_h, key_b, key_dir, key_tie = self._build_edges()
        order = np.lexsort((key_tie, key_dir, key_b, key_h))
        self.eu = np.ascontiguousarray(eu[order])
        self.ev = np.ascontiguousarray(ev[order])
        self.n_edges = self.eu.shape[0]

        lo = np.minimum(self.vertex_ids[self.eu], self.vertex_ids[self.ev])
        hi = np.maximum(self.vertex_ids[self.eu], self.vertex_ids[self.ev])
        self.edge_keys = mix64_array(mix64_array(lo ^ np.uint64(_EDGE_TAG)) ^ hi)

        on_boundary = (self.vertex_dist == rho) | (np.abs(self.vertex_height) == H)
        self.boundary_indices = np.nonzero(on_boundary)[0].astype(np.int64)

        self._incidence = None
        self._shells = None

    def _build_edges(self):
        H = self.window.height
        nh = self.n_heights
        nb = self.n_base

        # vertical: (b, h) -- (b, h+1)
        b = np.repeat(np.arange(nb, dtype=np.int64), nh - 1)
        t = np.tile(np.arange(nh - 1, dtype=np.int64), nb)
        vu = b * nh + t
        vv = vu + 1
        v_h = t - H
        v_b = b
        v_dir = np.zeros(vu.shape[0], dtype=np.int64)
        v_tie = np.zeros(vu.shape[0], dtype=np.int64)

        # horizontal: (b1, h) -- (b2, h) for each base edge, all heights
        r1 = np.repeat(self.base_edges[:, 0], nh)
        r2 = np.repeat(self.base_edges[:, 1], nh)
        t2 = np.tile(np.arange(nh, dtype=np.int64), self.base_edges.shape[0])
        hu = r1 * nh + t2
        hv = r2 * nh + t2
        h_h = t2 - H
        h_b = r1
        h_dir = np.ones(hu.shape[0], dtype=np.int64)
        h_tie = r2

        eu = np.concatenate([vu, hu])
        ev = np.concatenate([vv, hv])
        key_h = np.concatenate([v_h, h_h])
        key_b = np.concatenate([v_b, h_b])
        key_dir = np.concatenate([v_dir, h_dir])
        key_tie = np.concatenate([v_tie, h_tie])
        return eu, ev, key_h, key_b, key_dir, key_tie

    # ------------------------------------------------------------- lookups

    def index_of(self, v) -> int:
        base, h = v
        return self.base_index[base] * self.n_heights + (h + self.window.height)

    def vertex_at(self, i: int):
        base = self.base_vertices[i // self.n_heights]
        h = i % self.n_heights - self.window.height
        return (base, h)

    def edge_endpoints(self, e: int):
        return self.vertex_at(int(self.eu[e])), self.vertex_at(int(self.ev[e]))

    # ------------------------------------------------------ lazy structures

    @property
    def incidence(self):
        """CSR (indptr, edge_ids): edges incident to each vertex."""
        if self._incidence is None:
            m = self.n_edges
            both = np.concatenate([self.eu, self.ev])
            order = np.argsort(both, kind="stable")
            edge_ids = np.concatenate(
                [np.arange(m, dtype=np.int64), np.arange(m, dtype=np.int64)]
            )[order]
            deg = np.bincount(both, minlength=self.n_vertices)
            indptr = np.zeros(self.n_vertices + 1, dtype=np.int64)
            np.cumsum(deg, out=indptr[1:])
            self._incidence = (indptr, np.ascontiguousarray(edge_ids))
        return self._incidence

    @property
    def shells(self):
        """Arrays for escape-radius profiles on box windows.

        Vertex shell = max(base distance, |height|); an edge's shell is the
        larger of its endpoints', so the edges with shell <= r are exactly
        the edges of the box B(0, r).
        """
        if self._shells is None:
            vshell = np.maximum(self.vertex_dist, np.abs(self.vertex_height))
            eshell = np.maximum(vshell[self.eu], vshell[self.ev])
            rmax = min(self.window.base_radius, self.window.height)
            edge_order = np.argsort(eshell, kind="stable").astype(np.int64)
            ebins = np.bincount(np.minimum(eshell, rmax + 1), minlength=rmax + 2)
            edge_ptr = np.concatenate([[0], np.cumsum(ebins)]).astype(np.int64)
            vert_order = np.argsort(vshell, kind="stable").astype(np.int64)
            vbins = np.bincount(np.minimum(vshell, rmax + 1), minlength=rmax + 2)
            vert_ptr = np.concatenate([[0], np.cumsum(vbins)]).astype(np.int64)
            self._shells = (vshell, edge_order, edge_ptr, vert_order, vert_ptr)
        return self._shells


@lru_cache(maxsize=6)
def window_graph(spec: GraphSpec, window: Window) -> WindowGraph:
    return WindowGraph(spec, window)
