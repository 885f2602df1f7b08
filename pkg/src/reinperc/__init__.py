"""Percolation laboratory for product graphs G x Z with randomly
reinforced regions: quenched Monte Carlo, cone explorations, and
closed-form bound evaluation."""

__version__ = "0.1.0"

from .graphs import (
    Box,
    GraphSpec,
    Window,
    ball_count,
    count_box_edges,
    growth_constant,
    integer_lattice,
    regular_tree,
)
from .windows import WindowGraph, window_graph
from .environment import (
    MODELS,
    OVERLAP,
    STACK,
    Constant,
    Environment,
    Geometric,
    MomentFunctions,
    OverlapCone,
    PhiGrowth,
    PowerTail,
    Region,
    StackCone,
    build_region,
    classify_good_environment,
    dump_environment_text,
    load_environment_text,
    make_overlap_cones,
    make_stack_cones,
    moment_functions,
    phi_floor_level,
    phi_for_graph,
    sample_environment,
    stack_anchor_indices,
    stack_event_Ak,
)
from .engine import (
    BondConfiguration,
    ClusterIndex,
    ExplorationState,
    NoAnchorsError,
    build_clusters,
    connected,
    dump_bonds,
    explore_cone_boundary,
    load_bonds,
    origin_reaches_boundary,
    run_exploration_sequence,
    sample_bonds,
    sets_connected,
)
from .estimators import (
    AnnealedResult,
    DecayFit,
    EstimateResult,
    PcPoint,
    annealed_average,
    escape_counts,
    estimate_coverage,
    estimate_crossing,
    estimate_theta,
    fit_decay_rate,
    scan_pc_curve,
    survival_slope_ci,
    tplus_survival,
)
from .bounds import (
    CertificationError,
    SeriesValue,
    crude_growth_constant,
    disconnection_lower_bound,
    entropy_series,
    find_l0,
    find_n0,
    layer_size_bound,
    stack_series,
)
from .config import ConfigError, ExperimentConfig, config_from_dict, load_config
from .runner import run_experiment
from .rng import derive_seed

__all__ = [name for name in dir() if not name.startswith("_")]
