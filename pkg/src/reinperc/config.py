"""Experiment configuration: TOML ingestion with strict schema checking.

Unknown keys are hard errors (naming the offending section.key), because a
silently ignored typo in an experiment file is worse than a crash.  A parsed
config fully determines every random stream; see seed helpers at the bottom.
"""

from __future__ import annotations

from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # running on 3.10
    import tomli as tomllib

from .environment import Constant, Geometric, PowerTail, MODELS
from .graphs import GraphSpec, Window, integer_lattice, regular_tree
from .rng import derive_seed


class ConfigError(ValueError):
    pass


ESTIMATORS = ("theta", "coverage", "decay", "pc-curve")


@dataclass(frozen=True)
class ExperimentConfig:
    spec: GraphSpec
    window: Window
    estimator: str
    p_grid: tuple
    q_grid: tuple
    replicas: int
    master_seed: int
    output: str
    model: str | None = None
    dist_name: str | None = None
    dist_params: tuple = ()
    env_replicas: int = 1
    workers: int = 1
    record_timing: bool = False
    tau: float = 0.5
    radii: tuple = ()

    def distribution(self):
        if self.dist_name is None:
            return None
        return _DISTS[self.dist_name](*self.dist_params)

    def to_dict(self) -> dict:
        d = {
            "graph": {"kind": self.spec.kind, "parameter": self.spec.parameter},
            "window": {"base_radius": self.window.base_radius,
                       "height": self.window.height},
            "experiment": {
                "estimator": self.estimator,
                "p": list(self.p_grid),
                "q": list(self.q_grid),
                "replicas": self.replicas,
                "master_seed": self.master_seed,
                "output": self.output,
                "workers": self.workers,
                "record_timing": self.record_timing,
                "tau": self.tau,
                "radii": list(self.radii),
            },
        }
        if self.model is not None:
            d["environment"] = {
                "model": self.model,
                "distribution": self.dist_name,
                "parameters": list(self.dist_params),
                "replicas": self.env_replicas,
            }
        return d


_DISTS = {
    "constant": Constant,
    "geometric": Geometric,
    "power": PowerTail,
}


_REQUIRED = object()


def _take(section: dict, path: str, key: str, default=_REQUIRED):
    if key in section:
        return section.pop(key)
    if default is _REQUIRED:
        raise ConfigError(f"missing required key {path}.{key}")
    return default


def _reject_unknown(section: dict, path: str) -> None:
    if section:
        k = sorted(section)[0]
        raise ConfigError(f"unknown key {path}.{k}")


def _positive_int(value, path: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ConfigError(f"{path} must be a positive integer, got {value!r}")
    return value


def _prob_list(value, path: str) -> tuple:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        value = [value]
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{path} must be a number or nonempty list")
    out = []
    for i, x in enumerate(value):
        if not isinstance(x, (int, float)) or isinstance(x, bool) or not 0 <= x <= 1:
            raise ConfigError(f"{path}[{i}] must lie in [0, 1], got {x!r}")
        out.append(float(x))
    return tuple(out)


def config_from_dict(raw: dict) -> ExperimentConfig:
    raw = {k: (dict(v) if isinstance(v, dict) else v) for k, v in raw.items()}

    graph = raw.pop("graph", None)
    if not isinstance(graph, dict):
        raise ConfigError("missing required section [graph]")
    kind = _take(graph, "graph", "kind")
    parameter = _take(graph, "graph", "parameter")
    _reject_unknown(graph, "graph")
    if kind == "lattice":
        spec = integer_lattice(_positive_int(parameter, "graph.parameter"))
    elif kind == "tree":
        spec = regular_tree(_positive_int(parameter, "graph.parameter"))
    else:
        raise ConfigError(f"graph.kind must be 'lattice' or 'tree', got {kind!r}")

    win = raw.pop("window", None)
    if not isinstance(win, dict):
        raise ConfigError("missing required section [window]")
    w = Window(
        _positive_int(_take(win, "window", "base_radius"), "window.base_radius"),
        _positive_int(_take(win, "window", "height"), "window.height"),
    )
    _reject_unknown(win, "window")

    model = dist_name = None
    dist_params: tuple = ()
    env_replicas = 1
    env = raw.pop("environment", None)
    if env is not None:
        if not isinstance(env, dict):
            raise ConfigError("[environment] must be a section")
        model = _take(env, "environment", "model")
        if model not in MODELS:
            raise ConfigError(
                f"environment.model must be one of {sorted(MODELS)}, got {model!r}")
        dist_name = _take(env, "environment", "distribution")
        if dist_name not in _DISTS:
            raise ConfigError(
                f"environment.distribution must be one of {sorted(_DISTS)}")
        params = _take(env, "environment", "parameters")
        if not isinstance(params, list):
            raise ConfigError("environment.parameters must be a list")
        dist_params = tuple(params)
        env_replicas = _positive_int(
            _take(env, "environment", "replicas", 1), "environment.replicas")
        _reject_unknown(env, "environment")
        try:
            _DISTS[dist_name](*dist_params)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"environment.parameters invalid: {e}") from e

    exp = raw.pop("experiment", None)
    if not isinstance(exp, dict):
        raise ConfigError("missing required section [experiment]")
    estimator = _take(exp, "experiment", "estimator")
    if estimator not in ESTIMATORS:
        raise ConfigError(
            f"experiment.estimator must be one of {ESTIMATORS}, got {estimator!r}")
    p_grid = _prob_list(_take(exp, "experiment", "p", [0.0]), "experiment.p")
    q_grid = _prob_list(_take(exp, "experiment", "q", [0.0]), "experiment.q")
    replicas = _positive_int(_take(exp, "experiment", "replicas"),
                             "experiment.replicas")
    master_seed = _take(exp, "experiment", "master_seed", 0)
    if not isinstance(master_seed, int) or isinstance(master_seed, bool):
        raise ConfigError("experiment.master_seed must be an integer")
    output = _take(exp, "experiment", "output")
    if not isinstance(output, str) or not output:
        raise ConfigError("experiment.output must be a nonempty path")
    workers = _positive_int(_take(exp, "experiment", "workers", 1),
                            "experiment.workers")
    record_timing = _take(exp, "experiment", "record_timing", False)
    if not isinstance(record_timing, bool):
        raise ConfigError("experiment.record_timing must be a boolean")
    tau = _take(exp, "experiment", "tau", 0.5)
    if not isinstance(tau, (int, float)) or isinstance(tau, bool) or not 0 < tau < 1:
        raise ConfigError("experiment.tau must lie strictly in (0, 1)")
    radii_raw = _take(exp, "experiment", "radii", [])
    if not isinstance(radii_raw, list):
        raise ConfigError("experiment.radii must be a list of integers")
    radii = tuple(_positive_int(r, f"experiment.radii[{i}]")
                  for i, r in enumerate(radii_raw))
    _reject_unknown(exp, "experiment")
    _reject_unknown(raw, "")

    if estimator == "decay" and not radii:
        raise ConfigError("experiment.radii is required for the decay estimator")
    if estimator in ("coverage", "pc-curve") and model is None:
        raise ConfigError(f"[environment] section is required for {estimator}")

    return ExperimentConfig(
        spec=spec, window=w, estimator=estimator, p_grid=p_grid, q_grid=q_grid,
        replicas=replicas, master_seed=master_seed, output=output, model=model,
        dist_name=dist_name, dist_params=dist_params, env_replicas=env_replicas,
        workers=workers, record_timing=record_timing, tau=float(tau), radii=radii,
    )


def load_config(path: str) -> ExperimentConfig:
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"{path}: {e}") from e
    return config_from_dict(raw)


# ------------------------------------------------------------------- seeding

def env_seed(master_seed: int, env_index: int) -> int:
    return derive_seed(master_seed, "env", env_index)


def bond_seed(master_seed: int, env_index: int, replica_index: int) -> int:
    return derive_seed(master_seed, "bond", env_index, replica_index)


def bond_seed_base(master_seed: int, env_index: int) -> int:
    """Base from which per-replica streams are derived (rep j appends to it)."""
    return derive_seed(master_seed, "bond", env_index)
