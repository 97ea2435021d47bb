"""Named optimizer registry for benchmark runs.

Every runner obeys the same contract: ``runner(objective, seed, *,
iterations=None, swarm=None, **params) -> RunResult``.  ``iterations``
and ``swarm`` override the algorithm's own iteration-count and
population-size fields; remaining keyword arguments are passed through to
the algorithm's parameter dataclass.  Externally implemented optimizers
(genetic algorithms, cuckoo search, ...) can join comparisons by
registering a conforming callable.
"""

from __future__ import annotations

from typing import Protocol

from .bat import BatParams, bat_run
from .core import ObjectiveSpec, RunResult
from .harmony import HsParams, hs_run
from .pso import PsoParams, pso_run


class OptimizerRunner(Protocol):
    def __call__(
        self,
        objective: ObjectiveSpec,
        seed: int,
        *,
        iterations: int | None = None,
        swarm: int | None = None,
        **params,
    ) -> RunResult: ...


_REGISTRY: dict[str, OptimizerRunner] = {}


def register_optimizer(name: str, runner: OptimizerRunner, *, overwrite: bool = False) -> None:
    if not name or not isinstance(name, str):
        raise ValueError("optimizer name must be a non-empty string")
    if name in _REGISTRY and not overwrite:
        raise ValueError(f"optimizer {name!r} is already registered")
    _REGISTRY[name] = runner


def get_optimizer(name: str) -> OptimizerRunner:
    try:
        return _REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(_REGISTRY)) or "none"
        raise KeyError(f"unknown optimizer {name!r} (registered: {known})") from None


def available_optimizers() -> list[str]:
    return sorted(_REGISTRY)


def run_optimizer(name: str, objective: ObjectiveSpec, seed: int, **kwargs) -> RunResult:
    return get_optimizer(name)(objective, seed, **kwargs)


def _overridden(cls, iterations, swarm, size_field, params):
    kwargs = dict(params)
    if iterations is not None:
        kwargs["T"] = int(iterations)
    if swarm is not None:
        kwargs[size_field] = int(swarm)
    return cls(**kwargs)


def _run_bat(objective, seed, *, iterations=None, swarm=None, **params):
    return bat_run(objective, _overridden(BatParams, iterations, swarm, "n", params), seed)


def _run_pso(objective, seed, *, iterations=None, swarm=None, **params):
    return pso_run(objective, _overridden(PsoParams, iterations, swarm, "n", params), seed)


def _run_hs(objective, seed, *, iterations=None, swarm=None, **params):
    return hs_run(
        objective, _overridden(HsParams, iterations, swarm, "memory_size", params), seed
    )


register_optimizer("bat", _run_bat)
register_optimizer("pso", _run_pso)
register_optimizer("hs", _run_hs)
