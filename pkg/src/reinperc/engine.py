"""Quenched bond sampling, cluster labelling, and cone explorations.

A configuration is a pure function of (graph, window, region, p, q, seed):
each edge owns a uniform keyed by its endpoint hashes, open iff the uniform
falls below the regional parameter.  Shared keys give monotone coupling in
(p, q) and pathwise consistency across nested windows.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .environment import (
    Environment,
    Region,
    empty_region,
    make_stack_cones,
    stack_anchor_indices,
)
from .graphs import GraphSpec, Window
from .rng import mix64, uniforms_for_keys
from .windows import WindowGraph, window_graph

RUNNING = "running"
FAILED = "failed"
SUCCEEDED = "succeeded"


class NoAnchorsError(RuntimeError):
    """The environment has no usable anchor index inside the window."""


@dataclass(eq=False)
class BondConfiguration:
    wg: WindowGraph
    region: Region
    p: float
    q: float
    bond_seed: int
    probs: np.ndarray
    open_: np.ndarray

    @property
    def spec(self) -> GraphSpec:
        return self.wg.spec

    @property
    def window(self) -> Window:
        return self.wg.window

    def n_open(self) -> int:
        return int(self.open_.sum())


def sample_bonds(spec: GraphSpec, w: Window, region: Region | None, p: float,
                 q: float, bond_seed: int) -> BondConfiguration:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q={q} outside [0, 1]")
    wg = window_graph(spec, w)
    if region is None:
        region = empty_region(spec, w)
    probs = np.where(region.edge_mask(wg), q, p)
    u = uniforms_for_keys(wg.edge_keys, bond_seed)
    return BondConfiguration(wg, region, p, q, bond_seed, probs, u < probs)


@dataclass(eq=False)
class ClusterIndex:
    labels: np.ndarray

    @property
    def n_components(self) -> int:
        return int(np.unique(self.labels).size)


def build_clusters(cfg: BondConfiguration) -> ClusterIndex:
    nv = cfg.wg.n_vertices
    parent = np.empty(nv, dtype=np.int64)
    rank = np.empty(nv, dtype=np.int64)
    _kernels.uf_from_open(cfg.wg.eu, cfg.wg.ev, cfg.open_, parent, rank)
    return ClusterIndex(parent)


def connected(idx: ClusterIndex, u: int, v: int) -> bool:
    return bool(idx.labels[u] == idx.labels[v])


def sets_connected(idx: ClusterIndex, a, b) -> bool:
    """Some vertex of a shares a cluster with some vertex of b.

    Empty input on either side is false by convention.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.size == 0 or b.size == 0:
        return False
    ra = np.unique(idx.labels[a])
    rb = np.unique(idx.labels[b])
    return bool(np.intersect1d(ra, rb, assume_unique=True).size > 0)


def origin_reaches_boundary(idx: ClusterIndex, wg: WindowGraph) -> bool:
    blab = idx.labels[wg.boundary_indices]
    return bool(np.any(blab == idx.labels[wg.origin_index]))


# ----------------------------------------------------------------- exploration

def cone_mask(cone, wg: WindowGraph) -> np.ndarray:
    """Boolean vertex mask from a cone object, a mask, or an index set."""
    if isinstance(cone, np.ndarray):
        if cone.dtype == np.bool_:
            return cone
        out = np.zeros(wg.n_vertices, dtype=bool)
        out[cone] = True
        return out
    if hasattr(cone, "mask"):
        return cone.mask(wg)
    out = np.zeros(wg.n_vertices, dtype=bool)
    out[np.asarray(list(cone), dtype=np.int64)] = True
    return out


@dataclass(eq=False)
class ExplorationState:
    """Discovered set, examined edges, and verdict of one exploration."""

    start_mask: np.ndarray
    status: str = RUNNING
    examined: list = field(default_factory=list)
    added: list = field(default_factory=list)
    censored: bool = False

    def cluster_mask(self) -> np.ndarray:
        out = self.start_mask.copy()
        out[self.added] = True
        return out

    def n_steps(self) -> int:
        return len(self.examined)


def explore_cone_boundary(cfg: BondConfiguration, start_cone, target_cone,
                          w: Window | None = None,
                          trace: list | None = None) -> ExplorationState:
    """Reveal the open cluster of the start cone edge by edge.

    Edges come off a min-heap of canonical indices, so revelation order is
    the least-index unexamined boundary edge, matching the sequential
    definition exactly.  Stops failed at the first vertex landing in the
    target cone; succeeds when the in-window frontier is exhausted.
    """
    wg = cfg.wg
    sm = cone_mask(start_cone, wg)
    tm = cone_mask(target_cone, wg)
    if np.any(sm & tm):
        raise ValueError("start and target cones overlap inside the window")
    state = ExplorationState(start_mask=sm)
    inc_ptr, inc_edge = wg.incidence
    eu, ev, open_ = wg.eu, wg.ev, cfg.open_
    in_c = sm.copy()
    on_boundary = np.zeros(wg.n_vertices, dtype=bool)
    on_boundary[wg.boundary_indices] = True
    examined = np.zeros(wg.n_edges, dtype=bool)
    frontier = np.flatnonzero(in_c[eu] ^ in_c[ev]).tolist()
    heapq.heapify(frontier)
    while frontier:
        e = heapq.heappop(frontier)
        if examined[e]:
            continue
        u, v = int(eu[e]), int(ev[e])
        uin, vin = in_c[u], in_c[v]
        if uin and vin:
            continue  # stale: both endpoints joined since the push
        examined[e] = True
        state.examined.append(e)
        is_open = bool(open_[e])
        if trace is not None:
            trace.append(f"step {e} {'open' if is_open else 'closed'} {RUNNING}")
        if not is_open:
            continue
        wv = v if uin else u
        in_c[wv] = True
        state.added.append(wv)
        if on_boundary[wv]:
            state.censored = True
        if tm[wv]:
            state.status = FAILED
            if trace is not None:
                trace[-1] = f"step {e} open {FAILED}"
            return state
        for j in range(inc_ptr[wv], inc_ptr[wv + 1]):
            e2 = int(inc_edge[j])
            if examined[e2]:
                continue
            o = int(eu[e2] + ev[e2] - wv)
            if not in_c[o]:
                heapq.heappush(frontier, e2)
    state.status = SUCCEEDED
    if trace is not None and state.examined:
        e = state.examined[-1]
        trace[-1] = trace[-1].rsplit(" ", 1)[0] + f" {SUCCEEDED}"
    return state


def _reanchor_offsets(wg: WindowGraph, phi, level: int) -> np.ndarray:
    """Per vertex: smallest cone offset whose layer radius reaches it.

    Computed against the same integer inverse the cone masks use, so the
    re-anchored down-cone provably contains every explored vertex.
    """
    rho = wg.window.base_radius
    offs = np.arange(0, 2 * wg.window.height + 2, dtype=np.int64)
    prof = phi.inv_array(offs + level + 1, cap=rho + 1)
    return np.searchsorted(prof, wg.vertex_dist, side="left").astype(np.int64)


@dataclass(eq=False)
class SequenceResult:
    t_plus: int | None
    statuses: list
    anchors: list
    censored: bool
    reason: str  # "success" | "window" | "max_k"


def run_exploration_sequence(env: Environment, cfg: BondConfiguration, phi,
                             l0: int, level: int, w: Window,
                             max_k: int) -> SequenceResult:
    """Explorations at successively higher anchors until one succeeds.

    After a failure the next anchor is the least one whose down-cone
    contains the previous down-cone plus everything the exploration
    discovered.  Returns t_plus=None when max_k or the anchor supply runs
    out (reason distinguishes the two).
    """
    wg = cfg.wg
    anchors = stack_anchor_indices(env, phi, l0, level, w)
    if anchors.size == 0:
        raise NoAnchorsError(
            f"no anchor index inside heights [-{w.height}, {w.height}]"
        )
    zs = env.stack_centers()[anchors - env.lo]
    voff = _reanchor_offsets(wg, phi, level)
    vh = wg.vertex_height
    statuses: list = []
    used: list = []
    any_touch = False
    ai = 0
    while True:
        # exhaustion outranks the cap when both trip at once: it says a
        # larger cap could not have produced further explorations
        if ai >= anchors.size:
            return SequenceResult(None, statuses, used, any_touch, "window")
        if len(statuses) >= max_k:
            return SequenceResult(None, statuses, used, any_touch, "max_k")
        k = int(anchors[ai])
        up, down = make_stack_cones(env, phi, k, l0, level)
        state = explore_cone_boundary(cfg, down, up, w)
        statuses.append(state.status)
        used.append(k)
        any_touch = any_touch or state.censored
        if state.status == SUCCEEDED:
            # a success counts as censored only when it was itself leaky;
            # earlier failed explorations are definitive verdicts
            return SequenceResult(len(statuses), statuses, used,
                                  state.censored, "success")
        zmin = int(np.max(vh[state.added] + voff[state.added])) + l0
        ai += 1
        while ai < anchors.size and zs[ai] < zmin:
            ai += 1


# ------------------------------------------------------------------ replay IO

def dump_bonds(cfg: BondConfiguration, path: str) -> None:
    """Bit-vector dump with a JSON header line, for replay and audits."""
    header = {
        "kind": cfg.spec.kind,
        "parameter": cfg.spec.parameter,
        "base_radius": cfg.window.base_radius,
        "height": cfg.window.height,
        "p": cfg.p,
        "q": cfg.q,
        "bond_seed": cfg.bond_seed,
        "n_edges": int(cfg.open_.size),
    }
    packed = np.packbits(cfg.open_)
    with open(path, "wb") as fh:
        fh.write((json.dumps(header, sort_keys=True) + "\n").encode())
        fh.write(packed.tobytes())


def load_bonds(path: str) -> tuple[dict, np.ndarray]:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode())
        packed = np.frombuffer(fh.read(), dtype=np.uint8)
    n = header["n_edges"]
    open_ = np.unpackbits(packed)[:n].astype(bool)
    return header, open_


# ----------------------------------------------------- batch exploration setup

@dataclass(eq=False)
class ExplorationBatchPlan:
    """Precomputed per-anchor geometry for the compiled sequence kernel."""

    wg: WindowGraph
    probs: np.ndarray
    anchors: np.ndarray
    anchor_z: np.ndarray
    minus_mask: np.ndarray
    plus_mask: np.ndarray
    binit_ptr: np.ndarray
    binit_edge: np.ndarray
    voff: np.ndarray
    bflag: np.ndarray
    l0: int


def plan_exploration_batch(env: Environment, spec: GraphSpec, w: Window,
                           region: Region, p: float, q: float, phi,
                           l0: int, level: int) -> ExplorationBatchPlan:
    wg = window_graph(spec, w)
    anchors = stack_anchor_indices(env, phi, l0, level, w)
    if anchors.size == 0:
        raise NoAnchorsError(
            f"no anchor index inside heights [-{w.height}, {w.height}]"
        )
    probs = np.where(region.edge_mask(wg), q, p)
    zs = env.stack_centers()[anchors - env.lo]
    na = anchors.size
    nv = wg.n_vertices
    minus = np.zeros((na, nv), dtype=np.uint8)
    plus = np.zeros((na, nv), dtype=np.uint8)
    binit = []
    for i, k in enumerate(anchors):
        up, down = make_stack_cones(env, phi, int(k), l0, level)
        dm = down.mask(wg)
        um = up.mask(wg)
        minus[i] = dm
        plus[i] = um
        binit.append(np.flatnonzero(dm[wg.eu] ^ dm[wg.ev]).astype(np.int64))
    ptr = np.zeros(na + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([b.size for b in binit])
    edge = np.concatenate(binit) if binit else np.zeros(0, dtype=np.int64)
    bflag = np.zeros(nv, dtype=np.uint8)
    bflag[wg.boundary_indices] = 1
    return ExplorationBatchPlan(wg, probs, anchors, zs.astype(np.int64),
                                minus, plus, ptr, edge,
                                _reanchor_offsets(wg, phi, level), bflag, l0)


def run_exploration_batch(plan: ExplorationBatchPlan, bond_seeds,
                          cap: int) -> tuple[np.ndarray, np.ndarray]:
    """t_plus per seed: >0 success ordinal, 0 cap hit with all failures,
    <0 anchors exhausted after |t| failures."""
    wg = plan.wg
    inc_ptr, inc_edge = wg.incidence
    hseeds = np.array([mix64(int(s)) for s in bond_seeds], dtype=np.uint64)
    return _kernels.explore_batch(
        wg.n_vertices, wg.eu, wg.ev, wg.edge_keys, plan.probs, hseeds,
        inc_ptr, inc_edge, plan.minus_mask, plan.plus_mask, plan.binit_ptr,
        plan.binit_edge, plan.anchor_z, wg.vertex_height.astype(np.int64),
        plan.voff, plan.bflag, plan.l0, cap,
    )
