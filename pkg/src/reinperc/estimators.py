"""Monte Carlo estimators: theta proxies, decay rates, crossings, coverage,
annealed averages, the p_c(q) curve, and exploration survival.

Seeding convention: a replica's bond stream is derive_seed(base, "rep", j),
a function of the replica index alone, so accumulation order and thread
count can never change a result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .engine import (
    NoAnchorsError,
    cone_mask,
    plan_exploration_batch,
    run_exploration_batch,
)
from .environment import (
    build_region,
    empty_region,
    sample_environment,
)
from .graphs import GraphSpec, Window
from .rng import derive_seed, mix64
from .windows import window_graph


@dataclass(frozen=True)
class EstimateResult:
    point: float
    replicas: int
    half_width: float
    censored_fraction: float = 0.0


def binomial_result(hits: int, n: int, censored: int = 0) -> EstimateResult:
    p = hits / n
    hw = 1.96 * math.sqrt(p * (1.0 - p) / n)
    return EstimateResult(p, n, hw, censored / n)


def replica_seeds(bond_seed_base: int, n: int, start: int = 0) -> list:
    return [derive_seed(bond_seed_base, "rep", j) for j in range(start, start + n)]


def _hseeds(seeds) -> np.ndarray:
    return np.array([mix64(int(s)) for s in seeds], dtype=np.uint64)


def _edge_probs(spec, w, env, p, q):
    wg = window_graph(spec, w)
    region = build_region(env, spec, w) if env is not None else empty_region(spec, w)
    return wg, np.where(region.edge_mask(wg), q, p)


# ----------------------------------------------------------------------- theta

def estimate_theta(env, p: float, q: float, w: Window, replicas: int,
                   bond_seed_base: int = 0, *, spec: GraphSpec) -> EstimateResult:
    """Fraction of replicas where the origin reaches the window boundary."""
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise ValueError("p and q must lie in [0, 1]")
    wg, probs = _edge_probs(spec, w, env, p, q)
    hs = _hseeds(replica_seeds(bond_seed_base, replicas))
    hits = _kernels.theta_batch(wg.n_vertices, wg.eu, wg.ev, wg.edge_keys,
                                probs, hs, wg.origin_index,
                                wg.boundary_indices)
    return binomial_result(int(hits.sum()), replicas)


def theta_hits(env, p, q, w, seeds, *, spec) -> int:
    """Raw hit count for a batch of explicit replica seeds (scheduler use)."""
    wg, probs = _edge_probs(spec, w, env, p, q)
    hits = _kernels.theta_batch(wg.n_vertices, wg.eu, wg.ev, wg.edge_keys,
                                probs, _hseeds(seeds), wg.origin_index,
                                wg.boundary_indices)
    return int(hits.sum())


# ------------------------------------------------------------------ decay rate

@dataclass(frozen=True)
class DecayFit:
    rate: float
    r_squared: float
    radii: tuple
    probs: tuple
    replicas: int
    flags: tuple


def fit_decay_rate(spec: GraphSpec, p: float, w: Window, radii_grid,
                   replicas: int, seed: int = 0) -> DecayFit:
    """Least-squares slope of -log P(origin <-> shell r) against r.

    Radii with fewer than 10 surviving replicas are dropped (log of a tiny
    empirical frequency is noise); the grid is truncated at the first radius
    with zero survivors.  Both conditions are reported in flags.
    """
    wg = window_graph(spec, w)
    rmax = min(w.base_radius, w.height)
    radii = [int(r) for r in radii_grid]
    if any(r < 1 or r > rmax for r in radii):
        raise ValueError(f"radii must lie in [1, {rmax}]")
    _, edge_order, edge_ptr, vert_order, vert_ptr = wg.shells
    probs = np.full(wg.n_edges, float(p))
    hs = _hseeds(replica_seeds(seed, replicas))
    reach = _kernels.escape_batch(wg.n_vertices, wg.eu, wg.ev, wg.edge_keys,
                                  probs, hs, edge_ptr[:rmax + 2],
                                  edge_order, vert_ptr[:rmax + 2], vert_order,
                                  wg.origin_index)
    flags = []
    usable, phat = [], []
    for r in sorted(radii):
        hits = int((reach >= r).sum())
        if hits == 0:
            flags.append("truncated")
            break
        if hits < 10:
            flags.append(f"sparse-r{r}")
            continue
        usable.append(r)
        phat.append(hits / replicas)
    if len(usable) < 2:
        return DecayFit(float("nan"), 0.0, tuple(usable), tuple(phat),
                        replicas, tuple(flags) + ("degenerate",))
    x = np.array(usable, dtype=float)
    y = -np.log(np.array(phat))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 0.0
    if slope <= 0.05:
        flags.append("weak-decay")
    return DecayFit(float(slope), r2, tuple(usable), tuple(phat), replicas,
                    tuple(flags))


def escape_counts(env, p: float, q: float, w: Window, radii, replicas: int,
                  bond_seed_base: int = 0, *, spec: GraphSpec) -> dict:
    """Replica-coupled hit counts {r: #replicas reaching shell r}.

    Reaching shell r = max(base distance, |height|) only ever uses bonds
    inside B(r), so each count equals the boundary-escape count on the
    window of extents (r, r) under the same seeds; one run on the outer
    window yields every nested window at once, coupled replica by replica.
    """
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    wg, probs = _edge_probs(spec, w, env, p, q)
    rmax = min(w.base_radius, w.height)
    radii = [int(r) for r in radii]
    if any(r < 1 or r > rmax for r in radii):
        raise ValueError(f"radii must lie in [1, {rmax}]")
    _, edge_order, edge_ptr, vert_order, vert_ptr = wg.shells
    hs = _hseeds(replica_seeds(bond_seed_base, replicas))
    reach = _kernels.escape_batch(wg.n_vertices, wg.eu, wg.ev, wg.edge_keys,
                                  probs, hs, edge_ptr[:rmax + 2],
                                  edge_order, vert_ptr[:rmax + 2], vert_order,
                                  wg.origin_index)
    return {r: int((reach >= r).sum()) for r in radii}


# -------------------------------------------------------------------- crossing

def estimate_crossing(env, p: float, q: float, cones, w: Window,
                      replicas: int, bond_seed_base: int = 0, *,
                      spec: GraphSpec) -> EstimateResult:
    """Probability that the two cone restrictions share an open cluster.

    A replica counts as censored when the verdict is "not connected" but
    the joint cluster of both sets touches the window boundary outside the
    cones, where a larger window could still join them.
    """
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    wg, probs = _edge_probs(spec, w, env, p, q)
    a, b = cones
    am = cone_mask(a, wg)
    bm = cone_mask(b, wg)
    if np.any(am & bm):
        raise ValueError("cones overlap inside the window")
    aidx = np.flatnonzero(am).astype(np.int64)
    bidx = np.flatnonzero(bm).astype(np.int64)
    outside = np.ones(wg.n_vertices, dtype=bool)
    outside[aidx] = False
    outside[bidx] = False
    cidx = wg.boundary_indices[outside[wg.boundary_indices]]
    hs = _hseeds(replica_seeds(bond_seed_base, replicas))
    flags = _kernels.pair_batch(wg.n_vertices, wg.eu, wg.ev, wg.edge_keys,
                                probs, hs, aidx, bidx, cidx)
    hit = (flags & 1).astype(bool)
    cens = (~hit) & ((flags >> 1) & 1).astype(bool)
    return binomial_result(int(hit.sum()), replicas, int(cens.sum()))


# -------------------------------------------------------------------- coverage

def estimate_coverage(dist, model: str, spec: GraphSpec, w: Window,
                      env_replicas: int, env_seed_base: int = 0) -> EstimateResult:
    """Mean fraction of window vertices inside the reinforced region.

    Per-environment coverage is exact (counting, no bonds), so the only
    randomness is environmental; the CI uses the sample standard deviation.
    """
    if env_replicas < 1:
        raise ValueError("env_replicas must be >= 1")
    vals = []
    for i in range(env_replicas):
        env = sample_environment(dist, model, w, derive_seed(env_seed_base, "env", i))
        vals.append(build_region(env, spec, w).coverage_fraction())
    arr = np.array(vals)
    hw = 0.0
    if env_replicas > 1:
        hw = 1.96 * float(arr.std(ddof=1)) / math.sqrt(env_replicas)
    return EstimateResult(float(arr.mean()), env_replicas, hw, 0.0)


# ------------------------------------------------------------------- annealing

@dataclass(frozen=True)
class AnnealedResult(EstimateResult):
    between_std: float = 0.0
    within_std: float = 0.0
    env_count: int = 0


def annealed_average(estimator, env_seeds) -> AnnealedResult:
    """Grand mean over environments of a quenched estimator.

    `estimator` maps an env seed to an EstimateResult.  Environments get
    equal weight; the grand CI comes from the scatter of per-environment
    points, which already contains their Monte Carlo error.
    """
    seeds = list(env_seeds)
    if len(seeds) < 2:
        raise ValueError("need at least 2 environment seeds")
    results = [estimator(s) for s in seeds]
    pts = np.array([r.point for r in results])
    n_env = len(seeds)
    between = float(pts.std(ddof=1))
    within = float(np.mean([(r.half_width / 1.96) ** 2 for r in results])) ** 0.5
    hw = 1.96 * between / math.sqrt(n_env)
    return AnnealedResult(
        point=float(pts.mean()),
        replicas=int(sum(r.replicas for r in results)),
        half_width=hw,
        censored_fraction=float(np.mean([r.censored_fraction for r in results])),
        between_std=between,
        within_std=within,
        env_count=n_env,
    )


# ------------------------------------------------------------------ p_c curve

@dataclass(frozen=True)
class PcPoint:
    q: float
    p_c: float
    resolved: bool
    replicas_used: int


def scan_pc_curve(dist, model, q_grid, w: Window, replicas: int,
                  tau: float = 0.5, master_seed: int = 0, env_count: int = 1,
                  max_doublings: int = 3, *, spec: GraphSpec) -> list:
    """Bisect p until the theta proxy crosses tau, for each q.

    Bond uniforms are shared across p values (same replica seeds), so the
    estimated theta is exactly nondecreasing in p along the bisection and
    the noise handling only matters near the crossing: when the CI straddles
    tau the replica count doubles, a bounded number of times.
    """
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie in (0, 1)")
    if dist is None:
        env_count = 1

    def theta_at(p, q, n):
        if dist is None:
            return estimate_theta(None, p, q, w, n,
                                  derive_seed(master_seed, "bond", 0), spec=spec)

        def one_env(es):
            env = sample_environment(dist, model, w, es)
            return estimate_theta(env, p, q, w, n,
                                  derive_seed(master_seed, "bond", es), spec=spec)

        if env_count == 1:
            return one_env(derive_seed(master_seed, "env", 0))
        return annealed_average(
            one_env, [derive_seed(master_seed, "env", i) for i in range(env_count)]
        )

    out = []
    for q in q_grid:
        lo, hi = 0.0, 1.0
        resolved = True
        used = 0
        while hi - lo > 1.0 / 128.0:
            mid = 0.5 * (lo + hi)
            n = replicas
            for _ in range(max_doublings + 1):
                est = theta_at(mid, q, n)
                used = max(used, n)
                if abs(est.point - tau) > est.half_width:
                    break
                n *= 2
            else:
                resolved = False
            if est.point >= tau:
                hi = mid
            else:
                lo = mid
        out.append(PcPoint(float(q), 0.5 * (lo + hi), resolved, used))
    return out


# ---------------------------------------------------------- expansion survival

@dataclass(frozen=True)
class TplusSurvival:
    survival: tuple       # S(m) = P(T+ > m), m = 0..max_m
    at_risk: tuple        # denominator per m after censoring
    replicas: int
    max_m: int
    n_anchors: int
    exhausted_fraction: float
    censored_fraction: float   # successes that leaked through the boundary
    touched_fraction: float    # any exploration's added set exited the window
    t_raw: tuple
    cens_raw: tuple


def tplus_survival(spec: GraphSpec, w: Window, dist, p: float, q: float,
                   phi, l0: int, level: int, env_seed: int,
                   bond_seed_base: int, replicas: int,
                   max_m: int) -> TplusSurvival:
    """Empirical survival curve of the first-success ordinal.

    Runs the full sequential exploration per replica on one quenched
    environment.  Replicas whose anchor supply ran out are right-censored
    at the number of explorations they completed.
    """
    env = sample_environment(dist, "stack", w, env_seed)
    region = build_region(env, spec, w)
    plan = plan_exploration_batch(env, spec, w, region, p, q, phi, l0, level)
    seeds = replica_seeds(bond_seed_base, replicas)
    t, cens = run_exploration_batch(plan, seeds, cap=max_m + 1)
    surv, risk = survival_from_codes(t, max_m)
    leaky = (cens == 1) & (t > 0)
    return TplusSurvival(
        survival=tuple(surv),
        at_risk=tuple(risk),
        replicas=replicas,
        max_m=max_m,
        n_anchors=int(plan.anchors.size),
        exhausted_fraction=float((t < 0).mean()),
        censored_fraction=float(leaky.mean()),
        touched_fraction=float((cens == 1).mean()),
        t_raw=tuple(int(x) for x in t),
        cens_raw=tuple(int(x) for x in cens),
    )


def discard_leaky_successes(t: np.ndarray, cens: np.ndarray) -> np.ndarray:
    """Convert leaky successes into right-censored observations.

    A success whose exploration exited the window might not survive on a
    larger window; its preceding failures are still valid, so the replica
    is re-coded as censored after t - 1 observed failures.
    """
    t = np.asarray(t, dtype=np.int64)
    leaky = (np.asarray(cens) == 1) & (t > 0)
    return np.where(leaky, -(t - 1), t)


def survival_from_codes(t: np.ndarray, max_m: int):
    """S(m) from exploration codes: success ordinal > 0, 0 = cap survived,
    negative = right-censored (anchors exhausted) after |t| failures.

    A replica censored after k failures determines the event {T+ > m}
    exactly when m <= k (its first m explorations were all observed to
    fail), so it stays in the risk set through m = k.
    """
    t = np.asarray(t, dtype=np.int64)
    surv = np.empty(max_m + 1)
    risk = np.empty(max_m + 1, dtype=np.int64)
    for m in range(max_m + 1):
        known = (t >= 0) | (-t >= m)
        at_risk = int(known.sum())
        beyond = int(((t > m) | (t == 0) | ((t < 0) & (-t >= m))).sum())
        risk[m] = at_risk
        surv[m] = beyond / at_risk if at_risk else float("nan")
    return surv, risk


def survival_slope(t: np.ndarray, max_m: int) -> float:
    surv, _ = survival_from_codes(t, max_m)
    m = np.arange(max_m + 1, dtype=float)
    good = np.array(surv) > 0
    if good.sum() < 2:
        return float("nan")
    slope, _ = np.polyfit(m[good], np.log(np.array(surv)[good]), 1)
    return float(slope)


def survival_slope_ci(t: np.ndarray, max_m: int, n_boot: int = 400,
                      seed: int = 0):
    """Bootstrap percentile CI for the log-survival slope (replica resample)."""
    t = np.asarray(t, dtype=np.int64)
    point = survival_slope(t, max_m)
    rng = np.random.default_rng(seed)
    slopes = []
    for _ in range(n_boot):
        sample = t[rng.integers(0, t.size, t.size)]
        s = survival_slope(sample, max_m)
        if not math.isnan(s):
            slopes.append(s)
    lo, hi = np.percentile(slopes, [2.5, 97.5])
    return point, float(lo), float(hi)
