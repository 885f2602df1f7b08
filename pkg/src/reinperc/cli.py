"""Command line front end.

Verbs: run (execute a config), verify (self-check suites), bounds (closed-form
bound table), dump-env (write sampled environments as text).  Exit codes:
0 success, 1 invalid input, 2 runtime failure, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .bounds import (
    CertificationError,
    crude_growth_constant,
    disconnection_lower_bound,
    entropy_series,
    find_l0,
    find_n0,
    stack_series,
)
from .config import ConfigError, _DISTS, load_config
from .environment import (
    dump_environment_text,
    moment_functions,
    phi_floor_level,
    phi_for_graph,
    sample_environment,
)
from .graphs import count_box_edges, growth_constant, integer_lattice, regular_tree
from .rng import derive_seed
from .runner import run_experiment
from .verification import SUITES, run_suite


def _parse_graph(text: str):
    kind, _, param = text.partition(":")
    try:
        n = int(param)
    except ValueError:
        raise ConfigError(f"graph parameter must be an integer, got {param!r}")
    if kind == "lattice":
        return integer_lattice(n)
    if kind == "tree":
        return regular_tree(n)
    raise ConfigError(f"graph must be lattice:<dim> or tree:<degree>, got {text!r}")


def _parse_dist(name: str, params: list):
    if name not in _DISTS:
        raise ConfigError(f"distribution must be one of {sorted(_DISTS)}")
    vals = [int(x) if float(x).is_integer() else float(x) for x in params]
    try:
        return _DISTS[name](*vals)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad distribution parameters: {e}")


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    out = run_experiment(cfg)
    print(f"wrote {out / 'estimates.csv'} and {out / 'manifest.json'}")
    return 0


def _cmd_verify(args) -> int:
    kwargs = {}
    if args.suite == "oracle":
        kwargs = {"instances": args.instances, "seed": args.seed}
    elif args.suite == "statistics":
        kwargs = {"replicas": args.replicas, "seed": args.seed}
    results = run_suite(args.suite, **kwargs)
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        if r.flagged:
            status = "FLAG"
        failed += not r.passed
        print(f"{r.name:<{width}}  {status}  {r.detail}")
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 3 if failed else 0


def _cmd_bounds(args) -> int:
    spec = _parse_graph(args.graph)
    dist = _parse_dist(args.dist, args.params)
    c = args.c
    if c <= 0:
        raise ConfigError("--c must be positive")
    rows = []
    cg_fit = growth_constant(spec)
    cg_crude = crude_growth_constant(spec)
    rows.append(("growth_constant_fitted", f"graph={args.graph}",
                 cg_fit, "", True))
    rows.append(("growth_constant_crude", f"graph={args.graph}",
                 cg_crude, "", True))
    if not dist.mean_is_finite():
        rows.append(("entropy_series", "skipped: infinite-mean radius law",
                     "", "", False))
    else:
        mf = moment_functions(dist)
        for label, cg in (("fitted", cg_fit), ("crude", cg_crude)):
            try:
                n0 = find_n0(c, cg, mf)
                s = entropy_series(n0, c, cg, mf)
                rows.append((f"n0_{label}", f"c={c};c_G={cg:.6f}", n0, "", True))
                rows.append((f"entropy_series_{label}", f"n0={n0};c={c}",
                             s.value, s.tail, s.certified))
                edges = count_box_edges(spec, n0, n0)
                rows.append((f"disconnection_bound_{label}",
                             f"q={args.q};edges={edges}",
                             disconnection_lower_bound(args.q, edges), "", True))
            except CertificationError as e:
                rows.append((f"n0_{label}", f"c={c};c_G={cg:.6f}",
                             "", str(e), False))
    phi = phi_for_graph(spec, c)
    L = phi_floor_level(dist, phi)
    try:
        s = stack_series(phi, c, L, spec)
        rows.append(("stack_series", f"c={c};L={L}", s.value, s.tail, s.certified))
    except CertificationError as e:
        rows.append(("stack_series", f"c={c};L={L}", "", str(e), False))
    try:
        cert = find_l0(dist, phi, c, spec)
        rows.append(("l0", f"c={c};mass={cert.prob_mass:.4f}", cert.l0, "", True))
        rows.append(("l0_check_value", f"l0={cert.l0}", cert.check_value, "",
                     cert.previous_failed))
    except CertificationError as e:
        rows.append(("l0", f"c={c}", "", str(e), False))

    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(("quantity", "parameters", "value", "tail", "certified"))
    for row in rows:
        writer.writerow(row)
    return 0


def _cmd_dump_env(args) -> int:
    cfg = load_config(args.config)
    dist = cfg.distribution()
    if dist is None:
        raise ConfigError("config has no [environment] section to dump")
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(cfg.env_replicas):
        env = sample_environment(dist, cfg.model, cfg.window,
                                 derive_seed(cfg.master_seed, "env", i))
        path = out / f"environment_{i}.txt"
        path.write_text(dump_environment_text(env))
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="reinperc",
        description="percolation experiments on product graphs with "
                    "reinforced random regions")
    sub = ap.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("config", help="TOML config path")
    p_run.set_defaults(func=_cmd_run)

    p_ver = sub.add_parser("verify", help="run a self-check suite")
    p_ver.add_argument("suite", choices=sorted(SUITES))
    p_ver.add_argument("--instances", type=int, default=200,
                       help="oracle suite: number of random instances")
    p_ver.add_argument("--replicas", type=int, default=2000,
                       help="statistics suite: replicas per estimate")
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.set_defaults(func=_cmd_verify)

    p_bnd = sub.add_parser("bounds", help="print the closed-form bound table")
    p_bnd.add_argument("--graph", default="lattice:1",
                       help="lattice:<dim> or tree:<degree>")
    p_bnd.add_argument("--dist", default="geometric")
    p_bnd.add_argument("--params", type=float, nargs="+", default=[0.5],
                       help="distribution parameters")
    p_bnd.add_argument("--c", type=float, required=True,
                       help="decay rate c(p) to evaluate the bounds at")
    p_bnd.add_argument("--q", type=float, default=0.9,
                       help="reinforcement parameter for the disconnection bound")
    p_bnd.set_defaults(func=_cmd_bounds)

    p_env = sub.add_parser("dump-env", help="sample and write environments")
    p_env.add_argument("config", help="TOML config path")
    p_env.set_defaults(func=_cmd_dump_env)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
