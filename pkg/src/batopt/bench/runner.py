"""Seeded multi-replicate experiment execution.

Each (optimizer, replicate) cell runs with a seed derived from the master
seed, the optimizer name and the replicate index, so no stream is reused
across optimizers while every optimizer sees the same objective (and the
same synthetic dataset).  Failures are recorded per cell and the run
continues.  Aggregation is order-independent, so identical configs with
identical master seeds emit byte-identical tables.
"""

from __future__ import annotations

import time
import zlib
from dataclasses import dataclass

import numpy as np

from ..core import RunResult, derive_seed
from ..hawkes import l2_error
from ..registry import get_optimizer
from .config import BuiltObjective, ExperimentConfig, build_objective
from .tables import TIMING_METRIC, ResultTable, TableRow


@dataclass(frozen=True)
class RunRecord:
    optimizer: str
    replicate: int
    seed: int
    result: RunResult | None
    wall_s: float
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.result is None


@dataclass(frozen=True)
class ExperimentResult:
    table: ResultTable
    records: tuple[RunRecord, ...]
    built: BuiltObjective

    def best_record(self, optimizer: str) -> RunRecord:
        candidates = [
            r for r in self.records if r.optimizer == optimizer and not r.failed
        ]
        if not candidates:
            raise KeyError(f"no successful runs for optimizer {optimizer!r}")
        return min(candidates, key=lambda r: r.result.best_f)


def _name_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def replicate_seed(master_seed: int, optimizer: str, replicate: int) -> int:
    return derive_seed(master_seed, _name_key(optimizer), replicate)


def _metrics(record: RunRecord, built: BuiltObjective) -> dict[str, float]:
    result = record.result
    out = {"nll": result.best_f}
    for j, name in enumerate(built.param_names):
        out[name] = float(result.best_x[j])
    if built.truth is not None:
        out["l2_error"] = l2_error(result.best_x, built.truth)
    out[TIMING_METRIC] = record.wall_s
    return out


def _aggregate(records: list[RunRecord], built: BuiltObjective) -> ResultTable:
    metric_order: list[str] = ["nll", *built.param_names]
    if built.truth is not None:
        metric_order.append("l2_error")
    metric_order.append(TIMING_METRIC)

    by_name: dict[str, list[RunRecord]] = {}
    for record in records:
        by_name.setdefault(record.optimizer, []).append(record)

    rows = []
    for name, cell_records in by_name.items():
        ok = [r for r in cell_records if not r.failed]
        stats: dict[str, tuple[float, float]] = {}
        if ok:
            values = {m: [] for m in metric_order}
            for record in ok:
                for metric, value in _metrics(record, built).items():
                    values[metric].append(value)
            for metric in metric_order:
                arr = np.asarray(values[metric])
                sd = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
                stats[metric] = (float(arr.mean()), sd)
        rows.append(
            TableRow(
                optimizer=name,
                stats=stats,
                replicates=len(cell_records),
                failures=len(cell_records) - len(ok),
            )
        )
    return ResultTable(metrics=tuple(metric_order), rows=tuple(rows))


def run_experiment(config: ExperimentConfig, quiet: bool = True) -> ExperimentResult:
    """Run every optimizer for every replicate and aggregate the table."""
    config.validate()
    built = build_objective(config.objective, quiet=quiet)

    records: list[RunRecord] = []
    for choice in config.optimizers:
        runner = get_optimizer(choice.name)
        iterations = (
            choice.iterations if choice.iterations is not None else config.iterations
        )
        for rep in range(config.replicates):
            seed = replicate_seed(config.master_seed, choice.name, rep)
            started = time.perf_counter()
            try:
                result = runner(
                    built.objective,
                    seed,
                    iterations=iterations,
                    swarm=choice.swarm,
                    **choice.params,
                )
                error = None
            except Exception as exc:  # recorded per cell, run continues
                result = None
                error = f"{type(exc).__name__}: {exc}"
            records.append(
                RunRecord(
                    optimizer=choice.name,
                    replicate=rep,
                    seed=seed,
                    result=result,
                    wall_s=time.perf_counter() - started,
                    error=error,
                )
            )

    return ExperimentResult(
        table=_aggregate(records, built), records=tuple(records), built=built
    )
