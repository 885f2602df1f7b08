"""Experiment execution: deterministic replica scheduling and file emission.

Determinism contract: estimates.csv depends only on config content.  Replica
j always consumes the stream derive_seed(base, "rep", j); work is split into
fixed-size chunks whose integer hit counts are reduced in chunk order, so the
worker count can change timing but never bytes.  wall_time stays empty unless
the config opts into timing (timestamps would break byte-identical reruns).
"""

from __future__ import annotations

import csv
import hashlib
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .config import ExperimentConfig, bond_seed_base, env_seed
from .estimators import (
    annealed_average,
    binomial_result,
    estimate_coverage,
    fit_decay_rate,
    replica_seeds,
    scan_pc_curve,
    theta_hits,
)
from .environment import sample_environment

CSV_COLUMNS = ("estimator", "parameters", "point", "half_width", "replicas",
               "censored_fraction", "wall_time")

# Chunk size is part of the determinism contract: chunk boundaries fix the
# reduction order, so this constant must not depend on the worker count.
CHUNK = 256


def _chunked_theta(env, p, q, w, replicas, base, workers, spec):
    starts = list(range(0, replicas, CHUNK))

    def one(start):
        n = min(CHUNK, replicas - start)
        return theta_hits(env, p, q, w, replica_seeds(base, n, start), spec=spec)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(one, starts))
    else:
        counts = [one(s) for s in starts]
    return binomial_result(sum(counts), replicas)


def _fmt(x) -> str:
    if x == "":
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _theta_rows(cfg: ExperimentConfig):
    dist = cfg.distribution()
    for q in cfg.q_grid:
        for p in cfg.p_grid:
            if dist is None:
                est = _chunked_theta(None, p, q, cfg.window, cfg.replicas,
                                     bond_seed_base(cfg.master_seed, 0),
                                     cfg.workers, cfg.spec)
                envs = 0
            else:
                seeds = [env_seed(cfg.master_seed, i)
                         for i in range(cfg.env_replicas)]
                index = {s: i for i, s in enumerate(seeds)}

                def quenched(es):
                    env = sample_environment(dist, cfg.model, cfg.window, es)
                    return _chunked_theta(
                        env, p, q, cfg.window, cfg.replicas,
                        bond_seed_base(cfg.master_seed, index[es]),
                        cfg.workers, cfg.spec)

                est = (quenched(seeds[0]) if cfg.env_replicas == 1
                       else annealed_average(quenched, seeds))
                envs = cfg.env_replicas
            params = f"p={p:.10g};q={q:.10g};envs={envs}"
            yield params, est.point, est.half_width, est.replicas, est.censored_fraction


def _decay_rows(cfg: ExperimentConfig):
    for p in cfg.p_grid:
        fit = fit_decay_rate(cfg.spec, p, cfg.window, cfg.radii, cfg.replicas,
                             seed=bond_seed_base(cfg.master_seed, 0))
        params = (f"p={p:.10g};radii={'-'.join(map(str, cfg.radii))};"
                  f"r2={fit.r_squared:.6f};flags={'|'.join(fit.flags)}")
        yield params, fit.rate, "", fit.replicas, ""


def _coverage_rows(cfg: ExperimentConfig):
    est = estimate_coverage(cfg.distribution(), cfg.model, cfg.spec, cfg.window,
                            cfg.replicas, cfg.master_seed)
    params = f"model={cfg.model};dist={cfg.dist_name}"
    yield params, est.point, est.half_width, est.replicas, est.censored_fraction


def _pc_rows(cfg: ExperimentConfig):
    points = scan_pc_curve(cfg.distribution(), cfg.model, cfg.q_grid,
                           cfg.window, cfg.replicas, tau=cfg.tau,
                           master_seed=cfg.master_seed,
                           env_count=cfg.env_replicas, spec=cfg.spec)
    for pt in points:
        params = f"q={pt.q:.10g};tau={cfg.tau:.10g};resolved={pt.resolved}"
        yield params, pt.p_c, 1.0 / 256.0, pt.replicas_used, ""


_ROW_MAKERS = {
    "theta": _theta_rows,
    "decay": _decay_rows,
    "coverage": _coverage_rows,
    "pc-curve": _pc_rows,
}


def run_experiment(cfg: ExperimentConfig) -> Path:
    """Execute the config; returns the output directory.

    estimates.csv is written row by row, so an interrupted run leaves the
    completed rows behind together with a `partial` marker file; the marker
    is removed only after the manifest is written.
    """
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    marker = out / "partial"
    marker.write_text("run in progress or interrupted\n")
    t0 = time.perf_counter()
    rows = 0
    prev = t0
    with open(out / "estimates.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for params, point, hw, reps, cens in _ROW_MAKERS[cfg.estimator](cfg):
            now = time.perf_counter()
            wall = f"{now - prev:.3f}" if cfg.record_timing else ""
            prev = now
            writer.writerow([cfg.estimator, params, _fmt(point), _fmt(hw),
                             reps, _fmt(cens), wall])
            fh.flush()
            rows += 1
    _write_manifest(cfg, out, rows, time.perf_counter() - t0)
    marker.unlink()
    return out


def _write_manifest(cfg, out: Path, rows: int, wall: float) -> None:
    import numba
    import numpy

    blob = json.dumps(cfg.to_dict(), sort_keys=True).encode()
    manifest = {
        "config": cfg.to_dict(),
        "config_sha256": hashlib.sha256(blob).hexdigest(),
        "seed_scheme": ("env_seed_i = derive_seed(master, 'env', i); "
                        "bond stream (i, j) = derive_seed(derive_seed("
                        "master, 'bond', i), 'rep', j)"),
        "versions": {
            "package": __version__,
            "python": sys.version.split()[0],
            "numpy": numpy.__version__,
            "numba": numba.__version__,
        },
        "rows": rows,
        "wall_time_s": round(wall, 3),
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
