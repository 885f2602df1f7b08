"""Walk through one anchored cone exploration, edge by edge.

Samples a stack environment, picks the first usable anchor, and reveals the
open cluster of the down cone with a step trace.  Then runs the full
sequential scheme and reports where the first success landed.
"""

import argparse

from reinperc import STACK, Window, integer_lattice
from reinperc.engine import (
    explore_cone_boundary,
    run_exploration_sequence,
    sample_bonds,
)
from reinperc.environment import (
    Geometric,
    build_region,
    make_stack_cones,
    phi_floor_level,
    phi_for_graph,
    sample_environment,
    stack_anchor_indices,
)

P, Q = 0.25, 0.55
L0 = 1
MAX_K = 6


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--env-seed", type=int, default=6)
    ap.add_argument("--bond-seed", type=int, default=208)
    args = ap.parse_args()

    spec = integer_lattice(1)
    w = Window(5, 60)
    dist = Geometric(0.5)
    phi = phi_for_graph(spec, 1.0)
    level = phi_floor_level(dist, phi)

    env = sample_environment(dist, STACK, w, args.env_seed)
    region = build_region(env, spec, w)
    cfg = sample_bonds(spec, w, region, P, Q, args.bond_seed)

    anchors = stack_anchor_indices(env, phi, L0, level, w)
    k = int(anchors[0])
    z = int(env.stack_centers()[k - env.lo])
    print(f"{anchors.size} anchors in range; exploring anchor k={k} "
          f"(box center z={z}, radius {env.radius(k)})")

    up, down = make_stack_cones(env, phi, k, L0, level)
    trace = []
    state = explore_cone_boundary(cfg, down, up, w, trace=trace)
    shown = trace[:12]
    for line in shown:
        print("  " + line)
    if len(trace) > len(shown):
        print(f"  ... {len(trace) - len(shown)} more steps")
    print(f"verdict: {state.status} after {state.n_steps()} edges, "
          f"{len(state.added)} vertices added, censored={state.censored}")

    res = run_exploration_sequence(env, cfg, phi, L0, level, w, MAX_K)
    print(f"\nsequential scheme: anchors tried {res.anchors}, "
          f"statuses {res.statuses}")
    if res.t_plus is None:
        print(f"no success within the window (reason: {res.reason})")
    else:
        print(f"first success at exploration #{res.t_plus}")


if __name__ == "__main__":
    main()
