"""End-to-end acceptance gate: nine criteria at their stated tolerances.

Each test prints one pass/fail line (visible with -s, or in the captured
output of a failure) and then asserts.  All seeds are frozen, so the
statistical criteria are deterministic replays; the full gate takes tens
of minutes on one core, dominated by criteria 6 and 7.
"""

import functools
import hashlib
import math

import numpy as np
import pytest

import reinperc as rp
from reinperc import OVERLAP, STACK, Window, integer_lattice, regular_tree
from reinperc.config import config_from_dict
from reinperc.engine import FAILED, explore_cone_boundary, sample_bonds, sets_connected
from reinperc.environment import (
    Constant,
    Geometric,
    PowerTail,
    build_region,
    classify_good_environment,
    make_overlap_cones,
    moment_functions,
    phi_floor_level,
    phi_for_graph,
    sample_environment,
)
from reinperc.estimators import (
    escape_counts,
    estimate_coverage,
    estimate_crossing,
    fit_decay_rate,
    scan_pc_curve,
    survival_slope_ci,
    tplus_survival,
)
from reinperc.bounds import disconnection_lower_bound, find_n0
from reinperc.graphs import count_box_edges, growth_constant
from reinperc.rng import derive_seed, mix64, unit_from_u64
from reinperc.runner import run_experiment
from reinperc.verification import bfs_labels, run_suite, same_partition
from reinperc.windows import window_graph

Z1 = integer_lattice(1)


def _line(num, desc, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {desc} -- {detail}")


# --------------------------------------------------------------- criterion 1

def test_criterion_1_homogeneous_critical_point():
    pts = scan_pc_curve(None, None, [0.5], Window(128, 128), 2000,
                        master_seed=20, spec=Z1)
    pc = pts[0].p_c
    ok = abs(pc - 0.5) <= 0.02
    _line(1, "homogeneous Z x Z critical point 0.50 +- 0.02", ok,
          f"p_c = {pc:.6f}, replicas_used = {pts[0].replicas_used}")
    assert ok


# --------------------------------------------------------------- criterion 2

def test_criterion_2_oracle_equivalence():
    bases = [(integer_lattice(1), 334), (integer_lattice(2), 333),
             (regular_tree(3), 333)]
    w = Window(2, 5)
    bad_partition = bad_verdict = total = 0
    for spec, count in bases:
        wg = window_graph(spec, w)
        minus = wg.vertex_height <= -w.height + 1
        plus = wg.vertex_height >= w.height - 1
        for i in range(count):
            s = derive_seed(2, spec.kind, spec.parameter, i)
            p = 0.1 + 0.8 * unit_from_u64(mix64(s ^ 0x51AB))
            cfg = sample_bonds(spec, w, None, p, p, s)
            idx = rp.build_clusters(cfg)
            if not same_partition(idx.labels, bfs_labels(wg.n_vertices, wg.eu,
                                                         wg.ev, cfg.open_)):
                bad_partition += 1
            state = explore_cone_boundary(cfg, minus, plus)
            linked = sets_connected(idx, np.flatnonzero(minus),
                                    np.flatnonzero(plus))
            if (state.status == FAILED) != linked:
                bad_verdict += 1
            total += 1
    ok = bad_partition == 0 and bad_verdict == 0 and total == 1000
    _line(2, "union-find == BFS and exploration == connectivity, exact", ok,
          f"{total} instances, {bad_partition} partition / "
          f"{bad_verdict} verdict mismatches")
    assert ok


# --------------------------------------------------------------- criterion 3

def test_criterion_3_analytic_identities():
    results = run_suite("identities")
    bad = [r.name for r in results if not r.passed]
    ok = not bad
    _line(3, "series and bound closed forms", ok,
          f"{len(results) - len(bad)}/{len(results)} identities"
          + (f"; failed: {bad}" if bad else ""))
    assert ok


# --------------------------------------------------------------- criterion 4

def test_criterion_4_coverage_dichotomy():
    w = Window(50, 200)
    heavy = estimate_coverage(PowerTail(2.0), OVERLAP, Z1, w, 100, 4)
    light = estimate_coverage(Geometric(0.5), OVERLAP, Z1, w, 100, 4)
    s_h = heavy.half_width / 1.96
    s_l = light.half_width / 1.96
    ok = heavy.point >= 0.99 - 3 * s_h and light.point <= 0.9 + 3 * s_l
    _line(4, "coverage >= 0.99 heavy tail / <= 0.9 geometric (3 sigma)", ok,
          f"power-tail {heavy.point:.4f} (sigma {s_h:.4f}), "
          f"geometric {light.point:.4f} (sigma {s_l:.4f})")
    assert ok


# --------------------------------------------------------------- criterion 5

@functools.lru_cache(maxsize=None)
def _zz_decay_fit(p: float):
    return fit_decay_rate(Z1, p, Window(26, 26), range(4, 25), 200_000,
                          seed=derive_seed(51, "fit"))


def test_criterion_5_disconnection_bound_consistency():
    dist = Geometric(0.5)
    mf = moment_functions(dist)
    c_hat = _zz_decay_fit(0.3).rate
    n0 = find_n0(c_hat, growth_constant(Z1), mf)
    w = Window(max(16, mf.g(128)), 64)
    # classifier precondition g(n) < n/2 must hold from n0 on; bump if not
    while True:
        try:
            classify_good_environment(
                sample_environment(dist, OVERLAP, w, derive_seed(51, "env", 0)),
                mf, n0)
            break
        except ValueError:
            n0 += 1
    up, down = make_overlap_cones(mf, n0)
    good = 0
    pts = []
    for i in range(100):
        env = sample_environment(dist, OVERLAP, w, derive_seed(51, "env", i))
        good += classify_good_environment(env, mf, n0)
        est = estimate_crossing(env, 0.3, 0.9, (up, down), w, 600,
                                derive_seed(51, "bond", i), spec=Z1)
        pts.append(1.0 - est.point)
    nu = good / 100
    arr = np.array(pts)
    p_hat = float(arr.mean())
    sigma_p = float(arr.std(ddof=1)) / 10.0
    sigma_nu = math.sqrt(nu * (1 - nu) / 100)
    bound = disconnection_lower_bound(0.9, count_box_edges(Z1, n0, n0))
    sigma = math.sqrt(sigma_p**2 + (bound * sigma_nu) ** 2)
    rhs = bound * nu - 3 * sigma
    ok = p_hat >= rhs
    _line(5, "annealed disconnection >= (1/2)(1-q)^edges * nu - 3 sigma", ok,
          f"c_hat = {c_hat:.4f}, n0 = {n0}, nu_hat = {nu:.2f}, "
          f"P_hat = {p_hat:.2e}, bound = {bound:.3e}, rhs = {rhs:.3e}")
    assert ok


# --------------------------------------------------------------- criterion 6

CRIT6_COMBOS = [
    ("Z, Geometric(0.5)", integer_lattice(1), Geometric(0.5), 20, 200),
    ("Z, Constant(1)", integer_lattice(1), Constant(1), 16, 160),
    ("tree3, Geometric(0.8)", regular_tree(3), Geometric(0.8), 4, 200),
    ("tree3, Constant(1)", regular_tree(3), Constant(1), 4, 160),
]


@pytest.mark.parametrize("label,spec,dist,rho,height", CRIT6_COMBOS,
                         ids=[c[0] for c in CRIT6_COMBOS])
def test_criterion_6_first_success_geometric_tail(label, spec, dist, rho, height):
    phi = phi_for_graph(spec, 1.0)
    level = phi_floor_level(dist, phi)
    res = tplus_survival(spec, Window(rho, height), dist, 0.3, 0.9, phi,
                         1, level, env_seed=3, bond_seed_base=100,
                         replicas=40_000, max_m=8)
    # raw codes: the claim is about the window experiment's own tail, and
    # on the waist-width tree windows every success touches the side wall,
    # so the leak-discard variant would erase the signal it conservatively
    # guards for strip extrapolation
    t = np.array(res.t_raw)
    point, lo, hi = survival_slope_ci(t, 8, seed=6)
    ok = res.exhausted_fraction == 0.0 and hi < 0.0
    _line(6, f"P(T+ > m) slope < 0 at 95% [{label}]", ok,
          f"slope {point:.2e}, CI [{lo:.2e}, {hi:.2e}], "
          f"successes {(t > 0).sum()}, anchors {res.n_anchors}")
    assert ok


# --------------------------------------------------------------- criterion 7

N95 = 140_000  # replicas needed to resolve the tiny q=0.95 shell gaps
N80 = 4_000


def test_criterion_7_theta_decreasing_over_nested_windows():
    w = Window(128, 128)
    radii = [32, 64, 128]
    env_o = sample_environment(Constant(1), OVERLAP, w,
                               derive_seed(23, OVERLAP, 0))
    env_s = sample_environment(Constant(1), STACK, w,
                               derive_seed(23, STACK, 0))
    wg = window_graph(Z1, w)
    same_region = np.array_equal(build_region(env_o, Z1, w).edge_mask(wg),
                                 build_region(env_s, Z1, w).edge_mask(wg))
    assert same_region, "unit-radius overlap and stack regions must coincide"
    base = derive_seed(23, "bond")
    all_ok = True
    details = []
    for p in (0.3, 0.4):
        for q, n in ((0.8, N80), (0.95, N95)):
            counts = escape_counts(env_o, p, q, w, radii, n, base, spec=Z1)
            seq = [counts[r] for r in radii]
            strict = seq[0] > seq[1] > seq[2]
            all_ok &= strict
            details.append(f"p={p} q={q} n={n}: {seq}"
                           + ("" if strict else " NOT-STRICT"))
    _line(7, "theta strictly decreasing over windows 64/128/256, both models",
          all_ok, "; ".join(details))
    assert all_ok


# --------------------------------------------------------------- criterion 8

def test_criterion_8_decay_fit_quality():
    fit3 = _zz_decay_fit(0.3)
    fit2 = _zz_decay_fit(0.2)
    ok = (fit3.r_squared >= 0.95 and fit2.rate > fit3.rate
          and len(fit3.radii) >= 10)
    _line(8, "decay fit R^2 >= 0.95 on r in 4..24 and c(0.2) > c(0.3)", ok,
          f"c(0.3) = {fit3.rate:.4f} (R^2 {fit3.r_squared:.4f}, "
          f"fitted r {fit3.radii[0]}..{fit3.radii[-1]}, flags {fit3.flags}), "
          f"c(0.2) = {fit2.rate:.4f}")
    assert ok


# --------------------------------------------------------------- criterion 9

def test_criterion_9_byte_identical_parallelism(tmp_path):
    digests = []
    for name, workers in (("w1", 1), ("w4", 4), ("w16", 16), ("w1r", 1)):
        cfg = config_from_dict({
            "graph": {"kind": "lattice", "parameter": 1},
            "window": {"base_radius": 8, "height": 8},
            "environment": {"model": "overlap", "distribution": "geometric",
                            "parameters": [0.5], "replicas": 2},
            "experiment": {"estimator": "theta", "p": [0.3, 0.5],
                           "q": [0.8, 0.95], "replicas": 700,
                           "master_seed": 9, "workers": workers,
                           "output": str(tmp_path / name)},
        })
        out = run_experiment(cfg)
        digests.append(hashlib.sha256(
            (out / "estimates.csv").read_bytes()).hexdigest())
    ok = len(set(digests)) == 1
    _line(9, "byte-identical CSVs at parallelism 1/4/16 and on rerun", ok,
          f"sha256 {digests[0][:16]}... x {len(digests)}")
    assert ok
