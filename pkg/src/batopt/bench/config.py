"""Experiment configuration: YAML schema, validation, objective building.

Config format (``config_version: 1``)::

    config_version: 1
    objective:
      kind: logbinomial          # glm-geometric | glm-bernoulli | glm-poisson |
                                 # logbinomial | multistate | hawkes | sphere
      dataset: williamson-boundary   # CSV path or bundled name ...
      synthetic: {...}               # ... or a generator spec (see below)
      bounds: {lower: -10, upper: 10}
      penalty_weight: 1.0e4          # logbinomial only
    run:
      replicates: 100
      iterations: 100
      master_seed: 20260809
    optimizers:
      - name: bat                # any registered optimizer
        swarm: 100               # population / memory size override
        iterations: 200          # per-optimizer override of run.iterations
        params: {alpha: 0.95}    # passed through to the algorithm
    output:
      format: plain              # plain | csv | markdown
      path: null                 # default: stdout
      precision: 4

Synthetic generator specs by kind: GLM families take ``{n, beta, seed}``;
``hawkes`` takes ``{nu, a, b, horizon, seed}`` (the truth triple is then
used for the recovery-error column); ``multistate`` takes
``{individuals, beta, seed}``; ``sphere`` takes ``{dim}`` and needs no
dataset at all.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import yaml

from ..core import ObjectiveSpec, RngStream, SearchSpace
from ..glm import make_glm_objective
from ..hawkes import (
    DEFAULT_SEARCH_BOX,
    HawkesParams,
    make_hawkes_objective,
)
from ..logbinomial import DEFAULT_PENALTY_WEIGHT, make_logbinomial_objective
from ..multistate import make_multistate_objective
from ..registry import available_optimizers
from .datasets import (
    load_csv_dataset,
    synth_glm_dataset,
    synth_hawkes_events,
    synth_two_state_dataset,
)

CONFIG_VERSION = 1

OBJECTIVE_KINDS = (
    "glm-geometric",
    "glm-bernoulli",
    "glm-poisson",
    "logbinomial",
    "multistate",
    "hawkes",
    "sphere",
)


class ConfigError(ValueError):
    """The experiment configuration is invalid."""


@dataclass(frozen=True)
class OptimizerChoice:
    name: str
    swarm: int | None = None
    iterations: int | None = None
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ObjectiveConfig:
    kind: str
    dataset: str | None = None
    synthetic: dict | None = None
    bounds: tuple[float, float] | None = None
    penalty_weight: float = DEFAULT_PENALTY_WEIGHT


@dataclass(frozen=True)
class ExperimentConfig:
    objective: ObjectiveConfig
    optimizers: tuple[OptimizerChoice, ...]
    replicates: int = 10
    iterations: int = 100
    master_seed: int = 0
    out_format: str = "plain"
    out_path: str | None = None
    precision: int = 4

    def validate(self) -> None:
        if self.replicates < 1:
            raise ConfigError("replicates must be at least 1")
        if self.iterations < 0:
            raise ConfigError("iterations cannot be negative")
        if not self.optimizers:
            raise ConfigError("at least one optimizer is required")
        registered = set(available_optimizers())
        for opt in self.optimizers:
            if opt.name not in registered:
                raise ConfigError(
                    f"optimizer {opt.name!r} is not registered "
                    f"(have: {', '.join(sorted(registered))})"
                )
        names = [o.name for o in self.optimizers]
        if len(names) != len(set(names)):
            raise ConfigError("optimizer names must be unique within one experiment")
        obj = self.objective
        if obj.kind not in OBJECTIVE_KINDS:
            raise ConfigError(
                f"unknown objective kind {obj.kind!r} (have: {', '.join(OBJECTIVE_KINDS)})"
            )
        if obj.kind == "sphere":
            if not obj.synthetic or "dim" not in obj.synthetic:
                raise ConfigError("sphere objective needs synthetic: {dim: ...}")
        elif (obj.dataset is None) == (obj.synthetic is None):
            raise ConfigError(
                f"objective {obj.kind!r} needs exactly one of 'dataset' or 'synthetic'"
            )
        if self.out_format not in ("plain", "csv", "markdown"):
            raise ConfigError(f"unknown output format {self.out_format!r}")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must fit in 64 unsigned bits")


def _as_bounds(raw) -> tuple[float, float] | None:
    if raw is None:
        return None
    if not isinstance(raw, dict) or set(raw) != {"lower", "upper"}:
        raise ConfigError("bounds must be a {lower: ..., upper: ...} mapping")
    lo, hi = float(raw["lower"]), float(raw["upper"])
    if not lo < hi:
        raise ConfigError("bounds lower must be strictly below upper")
    return lo, hi


def config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    version = raw.get("config_version")
    if version != CONFIG_VERSION:
        raise ConfigError(
            f"config_version must be {CONFIG_VERSION}, got {version!r}"
        )
    unknown = set(raw) - {"config_version", "objective", "run", "optimizers", "output"}
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")

    obj_raw = raw.get("objective") or {}
    if "kind" not in obj_raw:
        raise ConfigError("objective.kind is required")
    objective = ObjectiveConfig(
        kind=str(obj_raw["kind"]),
        dataset=obj_raw.get("dataset"),
        synthetic=obj_raw.get("synthetic"),
        bounds=_as_bounds(obj_raw.get("bounds")),
        penalty_weight=float(obj_raw.get("penalty_weight", DEFAULT_PENALTY_WEIGHT)),
    )

    run_raw = raw.get("run") or {}
    opt_raw = raw.get("optimizers") or []
    if not isinstance(opt_raw, list):
        raise ConfigError("optimizers must be a list")
    optimizers = []
    for entry in opt_raw:
        if isinstance(entry, str):
            entry = {"name": entry}
        if "name" not in entry:
            raise ConfigError("every optimizer entry needs a name")
        optimizers.append(
            OptimizerChoice(
                name=str(entry["name"]),
                swarm=None if entry.get("swarm") is None else int(entry["swarm"]),
                iterations=(
                    None if entry.get("iterations") is None else int(entry["iterations"])
                ),
                params=dict(entry.get("params") or {}),
            )
        )

    out_raw = raw.get("output") or {}
    config = ExperimentConfig(
        objective=objective,
        optimizers=tuple(optimizers),
        replicates=int(run_raw.get("replicates", 10)),
        iterations=int(run_raw.get("iterations", 100)),
        master_seed=int(run_raw.get("master_seed", 0)),
        out_format=str(out_raw.get("format", "plain")),
        out_path=out_raw.get("path"),
        precision=int(out_raw.get("precision", 4)),
    )
    config.validate()
    return config


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    return config_from_dict(raw)


@dataclass(frozen=True)
class BuiltObjective:
    """An objective plus the reporting metadata the runner needs."""

    objective: ObjectiveSpec
    param_names: tuple[str, ...]
    truth: np.ndarray | None = None  # enables the recovery-error column
    description: str = ""


def _seeded(spec: dict, what: str) -> RngStream:
    if "seed" not in spec:
        raise ConfigError(f"synthetic {what} spec needs a seed")
    return RngStream(int(spec["seed"])).child(0)


def build_objective(obj: ObjectiveConfig, quiet: bool = True) -> BuiltObjective:
    """Materialize the configured objective (loading or simulating data)."""
    kind = obj.kind
    bounds = obj.bounds or (-10.0, 10.0)

    if kind == "sphere":
        dim = int(obj.synthetic["dim"])
        space = SearchSpace.box(bounds[0], bounds[1], dim)
        return BuiltObjective(
            objective=ObjectiveSpec(
                space=space,
                evaluate=lambda x: float(np.sum(x * x)),
                batch=lambda X: np.sum(X * X, axis=1),
                name="sphere",
            ),
            param_names=tuple(f"x{i}" for i in range(dim)),
            description=f"sphere test function, {dim} dims",
        )

    if kind.startswith("glm-"):
        family = kind.removeprefix("glm-")
        if obj.dataset is not None:
            data = load_csv_dataset(obj.dataset, "glm", quiet=quiet)
            descr = f"{family} GLM on {obj.dataset}"
        else:
            spec = obj.synthetic
            data = synth_glm_dataset(
                family, int(spec["n"]), spec["beta"], _seeded(spec, kind)
            )
            descr = f"synthetic {family} GLM (n={data.n}, k={data.k})"
        return BuiltObjective(
            objective=make_glm_objective(data, family, bounds),
            param_names=tuple(f"b{i}" for i in range(data.k)),
            description=descr,
        )

    if kind == "logbinomial":
        if obj.dataset is None:
            raise ConfigError("logbinomial objective needs a dataset")
        data = load_csv_dataset(obj.dataset, "grouped-binomial", quiet=quiet)
        return BuiltObjective(
            objective=make_logbinomial_objective(data, bounds, obj.penalty_weight),
            param_names=tuple(f"b{i}" for i in range(data.k)),
            description=f"log-binomial on {obj.dataset}",
        )

    if kind == "multistate":
        if obj.dataset is not None:
            data = load_csv_dataset(obj.dataset, "multistate", quiet=quiet)
            descr = f"markov renewal on {obj.dataset}"
        else:
            spec = obj.synthetic
            data = synth_two_state_dataset(
                int(spec["individuals"]), float(spec["beta"]), _seeded(spec, kind)
            )
            descr = f"synthetic two-state renewal ({data.n_records} spells)"
        return BuiltObjective(
            objective=make_multistate_objective(data, bounds),
            param_names=tuple(f"b{i}" for i in range(data.n_covariates)),
            description=descr,
        )

    if kind == "hawkes":
        truth = None
        if obj.dataset is not None:
            events = load_csv_dataset(obj.dataset, "events", quiet=quiet)
            descr = f"hawkes MLE on {obj.dataset}"
        else:
            spec = obj.synthetic
            truth_params = HawkesParams(
                float(spec["nu"]), float(spec["a"]), float(spec["b"])
            )
            events = synth_hawkes_events(
                truth_params, float(spec["horizon"]), _seeded(spec, kind)
            )
            truth = truth_params.as_array()
            descr = (
                f"synthetic hawkes ({len(events)} events, horizon {events.horizon:g})"
            )
        box = (
            DEFAULT_SEARCH_BOX
            if obj.bounds is None
            else SearchSpace.box(bounds[0], bounds[1], 3)
        )
        return BuiltObjective(
            objective=make_hawkes_objective(events, box),
            param_names=("nu", "a", "b"),
            truth=truth,
            description=descr,
        )

    raise ConfigError(f"unknown objective kind {kind!r}")
