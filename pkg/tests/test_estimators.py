"""Monte Carlo estimators: theta, decay fits, crossings, annealing, survival."""

import math

import numpy as np
import pytest

from reinperc.environment import (
    OVERLAP,
    Geometric,
    phi_floor_level,
    phi_for_graph,
    sample_environment,
)
from reinperc.estimators import (
    annealed_average,
    binomial_result,
    discard_leaky_successes,
    escape_counts,
    estimate_coverage,
    estimate_crossing,
    estimate_theta,
    fit_decay_rate,
    replica_seeds,
    scan_pc_curve,
    survival_from_codes,
    survival_slope,
    survival_slope_ci,
    theta_hits,
    tplus_survival,
)
from reinperc.graphs import Window, integer_lattice
from reinperc.rng import derive_seed
from reinperc.windows import window_graph

Z1 = integer_lattice(1)
Z2 = integer_lattice(2)


def test_binomial_result():
    r = binomial_result(30, 120, censored=6)
    assert r.point == 0.25
    assert r.half_width == pytest.approx(1.96 * math.sqrt(0.25 * 0.75 / 120))
    assert r.censored_fraction == 0.05
    assert binomial_result(0, 10).half_width == 0.0


def test_replica_seeds_offset():
    base = 77
    assert replica_seeds(base, 8)[3:] == replica_seeds(base, 5, start=3)
    assert len(set(replica_seeds(base, 100))) == 100
    assert replica_seeds(base, 3) != replica_seeds(base + 1, 3)


def test_theta_extremes_and_validation():
    w = Window(3, 3)
    assert estimate_theta(None, 1.0, 1.0, w, 50, spec=Z2).point == 1.0
    assert estimate_theta(None, 0.0, 0.0, w, 50, spec=Z2).point == 0.0
    with pytest.raises(ValueError):
        estimate_theta(None, 0.5, 0.5, w, 0, spec=Z2)
    with pytest.raises(ValueError):
        estimate_theta(None, 1.2, 0.5, w, 10, spec=Z2)


def test_theta_monotone_in_p():
    w = Window(6, 6)
    pts = [estimate_theta(None, p, p, w, 400, 3, spec=Z2).point
           for p in (0.2, 0.35, 0.5, 0.65)]
    assert pts == sorted(pts)
    assert pts[0] < pts[-1]


def test_theta_hits_matches_estimate():
    w = Window(5, 5)
    n, base = 300, 9
    est = estimate_theta(None, 0.45, 0.45, w, n, base, spec=Z2)
    hits = theta_hits(None, 0.45, 0.45, w, replica_seeds(base, n), spec=Z2)
    assert hits == round(est.point * n)


def test_escape_counts_equal_per_window_theta():
    dist = Geometric(0.5)
    big = Window(8, 8)
    env = sample_environment(dist, OVERLAP, big, 5)
    n, base = 300, 11
    counts = escape_counts(env, 0.28, 0.5, big, [3, 5, 8], n, base, spec=Z1)
    assert counts[3] > counts[5] > counts[8] > 0
    for r in (3, 5, 8):
        hits = theta_hits(env, 0.28, 0.5, Window(r, r),
                          replica_seeds(base, n), spec=Z1)
        assert counts[r] == hits


# ------------------------------------------------------------------ decay fits

def test_fit_decay_rate_subcritical():
    fit = fit_decay_rate(Z2, 0.25, Window(10, 10), range(1, 11), 1500, seed=2)
    assert fit.rate > 0.05
    assert 0.9 < fit.r_squared <= 1.0
    assert list(fit.radii) == sorted(fit.radii)
    assert all(p >= 10 / 1500 for p in fit.probs)
    assert "weak-decay" not in fit.flags


def test_fit_decay_rate_weak_flag():
    fit = fit_decay_rate(Z1, 0.9, Window(8, 8), [2, 4, 6, 8], 400, seed=0)
    assert "weak-decay" in fit.flags


def test_fit_decay_rate_sparse_and_truncated():
    # p so small that far shells lose all survivors
    fit = fit_decay_rate(Z1, 0.04, Window(12, 12), range(1, 13), 300, seed=1)
    assert any(f == "truncated" or f.startswith("sparse") for f in fit.flags)
    if "truncated" in fit.flags:
        assert max(fit.radii, default=0) < 12


def test_fit_decay_rate_degenerate_and_validation():
    fit = fit_decay_rate(Z1, 0.3, Window(6, 6), [2], 100)
    assert math.isnan(fit.rate)
    assert "degenerate" in fit.flags
    with pytest.raises(ValueError):
        fit_decay_rate(Z1, 0.3, Window(6, 6), [0, 2], 100)
    with pytest.raises(ValueError):
        fit_decay_rate(Z1, 0.3, Window(6, 6), [2, 7], 100)


# ------------------------------------------------------------------- crossings

def _height_bands(spec, w):
    wg = window_graph(spec, w)
    return (np.flatnonzero(wg.vertex_height == -w.height),
            np.flatnonzero(wg.vertex_height == w.height))


def test_crossing_extremes():
    w = Window(4, 6)
    bands = _height_bands(Z1, w)
    hi = estimate_crossing(None, 1.0, 1.0, bands, w, 60, spec=Z1)
    assert hi.point == 1.0 and hi.censored_fraction == 0.0
    lo = estimate_crossing(None, 0.0, 0.0, bands, w, 60, spec=Z1)
    assert lo.point == 0.0


def test_crossing_censoring_counts_only_misses():
    w = Window(4, 6)
    bands = _height_bands(Z1, w)
    r = estimate_crossing(None, 0.5, 0.5, bands, w, 400, 7, spec=Z1)
    assert 0.0 < r.point < 1.0
    assert 0.0 < r.censored_fraction <= 1.0 - r.point + 1e-12


def test_crossing_rejects_overlap():
    w = Window(3, 3)
    a, _ = _height_bands(Z1, w)
    with pytest.raises(ValueError):
        estimate_crossing(None, 0.5, 0.5, (a, a), w, 10, spec=Z1)


# -------------------------------------------------------------------- coverage

def test_coverage_deterministic_and_validated():
    a = estimate_coverage(Geometric(0.5), OVERLAP, Z1, Window(10, 8), 5, 3)
    b = estimate_coverage(Geometric(0.5), OVERLAP, Z1, Window(10, 8), 5, 3)
    assert a == b
    assert 0.0 < a.point < 1.0
    assert estimate_coverage(Geometric(0.5), OVERLAP, Z1, Window(4, 4), 1).half_width == 0.0
    with pytest.raises(ValueError):
        estimate_coverage(Geometric(0.5), OVERLAP, Z1, Window(4, 4), 0)


# ------------------------------------------------------------------- annealing

def test_annealed_average_arithmetic():
    canned = {
        1: binomial_result(40, 100),
        2: binomial_result(60, 100),
        3: binomial_result(50, 100),
    }
    res = annealed_average(lambda s: canned[s], [1, 2, 3])
    assert res.point == pytest.approx(0.5)
    assert res.replicas == 300
    assert res.env_count == 3
    assert res.between_std == pytest.approx(np.std([0.4, 0.6, 0.5], ddof=1))
    assert res.half_width == pytest.approx(1.96 * res.between_std / math.sqrt(3))
    assert res.within_std > 0
    with pytest.raises(ValueError):
        annealed_average(lambda s: canned[1], [1])


def test_annealed_theta_over_environments():
    w = Window(6, 6)
    dist = Geometric(0.5)

    def one(env_seed):
        env = sample_environment(dist, OVERLAP, w, env_seed)
        return estimate_theta(env, 0.3, 0.8, w, 200, 5, spec=Z1)

    res = annealed_average(one, [derive_seed(0, "env", i) for i in range(4)])
    assert 0.0 <= res.point <= 1.0
    assert res.between_std >= 0.0
    assert res.replicas == 800


# -------------------------------------------------------------------- pc curve

def test_scan_pc_curve_homogeneous_smoke():
    pts = scan_pc_curve(None, None, [0.5], Window(16, 16), 200,
                        master_seed=4, spec=Z2)
    assert len(pts) == 1
    pt = pts[0]
    assert pt.q == 0.5
    assert 0.25 < pt.p_c < 0.75
    assert pt.replicas_used >= 200
    with pytest.raises(ValueError):
        scan_pc_curve(None, None, [0.5], Window(4, 4), 10, tau=1.5, spec=Z2)


def test_scan_pc_curve_reinforcement_lowers_pc():
    dist = Geometric(0.5)
    grid_hom = scan_pc_curve(None, None, [0.9], Window(12, 12), 300,
                             master_seed=8, spec=Z1)
    grid_env = scan_pc_curve(dist, OVERLAP, [0.9], Window(12, 12), 300,
                             master_seed=8, spec=Z1)
    assert grid_env[0].p_c < grid_hom[0].p_c


# -------------------------------------------------------- survival machinery

def test_survival_from_codes_frozen():
    surv, risk = survival_from_codes(np.array([3, -2, 0]), 4)
    assert list(surv) == [1.0, 1.0, 1.0, 0.5, 0.5]
    assert list(risk) == [3, 3, 3, 2, 2]


def test_survival_empty_risk_is_nan():
    surv, risk = survival_from_codes(np.array([-1]), 3)
    assert risk[2] == 0 and math.isnan(surv[2])


def test_discard_leaky_successes():
    t = np.array([3, -2, 0, 1])
    cens = np.array([1, 1, 0, 0])
    assert list(discard_leaky_successes(t, cens)) == [-2, -2, 0, 1]


def test_survival_slope_frozen():
    t = np.array([1] * 50 + [2] * 25 + [3] * 12 + [4] * 6 + [5] * 3 + [0] * 4)
    s = survival_slope(t, 4)
    assert s == pytest.approx(-0.66657, abs=1e-3)
    assert survival_slope(np.array([1, 1]), 4) != survival_slope(t, 4)


def test_survival_slope_ci_brackets_point():
    rng = np.random.default_rng(0)
    t = rng.geometric(0.45, size=500)
    t[rng.random(500) < 0.1] = 0
    point, lo, hi = survival_slope_ci(t, 5, n_boot=200, seed=1)
    assert lo <= point <= hi
    again = survival_slope_ci(t, 5, n_boot=200, seed=1)
    assert again == (point, lo, hi)


def test_tplus_survival_structure():
    dist = Geometric(0.5)
    phi = phi_for_graph(Z1, 1.0)
    level = phi_floor_level(dist, phi)
    res = tplus_survival(Z1, Window(5, 60), dist, 0.25, 0.55, phi, 1, level,
                         env_seed=6, bond_seed_base=42, replicas=120, max_m=4)
    assert res.survival[0] == 1.0
    assert list(res.survival) == sorted(res.survival, reverse=True)
    assert list(res.at_risk) == sorted(res.at_risk, reverse=True)
    assert len(res.survival) == res.max_m + 1 == 5
    assert res.n_anchors > 0
    assert 0.0 <= res.exhausted_fraction <= 1.0
    assert 0.0 <= res.censored_fraction <= res.touched_fraction <= 1.0
    assert len(res.t_raw) == 120
    # recomputing the curve from the raw codes reproduces it
    surv, risk = survival_from_codes(np.array(res.t_raw), 4)
    assert tuple(surv) == res.survival and tuple(risk) == res.at_risk
