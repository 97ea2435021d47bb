"""Result aggregation and table emission (plain text, CSV, markdown).

Tables report per-optimizer means and standard deviations in the
``mean (sd)`` style; CSV output keeps means and deviations in separate
columns so the numbers round-trip exactly at the emitted precision.
Wall-clock statistics are carried in the table but excluded from emitted
text by default, keeping emission byte-identical across repeated runs of
the same seeded experiment.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

TIMING_METRIC = "time_s"


@dataclass(frozen=True)
class TableRow:
    optimizer: str
    stats: dict[str, tuple[float, float]]  # metric -> (mean, sd)
    replicates: int
    failures: int = 0


@dataclass(frozen=True)
class ResultTable:
    """Summary of one experiment: one row per optimizer."""

    metrics: tuple[str, ...]
    rows: tuple[TableRow, ...]

    def __post_init__(self):
        for row in self.rows:
            if row.failures < 0 or row.replicates < row.failures:
                raise ValueError("failure counts must lie in [0, replicates]")
            for metric, (_, sd) in row.stats.items():
                if not math.isnan(sd) and sd < 0.0:
                    raise ValueError(f"negative deviation for {metric!r}")

    def row(self, optimizer: str) -> TableRow:
        for r in self.rows:
            if r.optimizer == optimizer:
                return r
        raise KeyError(f"no row for optimizer {optimizer!r}")


def _visible_metrics(table: ResultTable, include_timing: bool) -> list[str]:
    return [
        m for m in table.metrics if include_timing or m != TIMING_METRIC
    ]


def _fmt(value: float, precision: int) -> str:
    return f"{value:.{precision}g}"


def _cell(row: TableRow, metric: str, precision: int) -> str:
    if metric not in row.stats:
        return "-"
    mean, sd = row.stats[metric]
    return f"{_fmt(mean, precision)} ({_fmt(sd, precision)})"


def emit_table(
    table: ResultTable,
    fmt: str = "plain",
    precision: int = 4,
    include_timing: bool = False,
) -> str:
    if fmt == "csv":
        return _emit_csv(table, precision, include_timing)
    if fmt == "markdown":
        return _emit_markdown(table, precision, include_timing)
    if fmt == "plain":
        return _emit_plain(table, precision, include_timing)
    raise ValueError(f"unknown table format {fmt!r}")


def _emit_plain(table, precision, include_timing) -> str:
    metrics = _visible_metrics(table, include_timing)
    header = ["optimizer"] + metrics
    body = [
        [row.optimizer] + [_cell(row, m, precision) for m in metrics]
        for row in table.rows
    ]
    widths = [
        max(len(line[j]) for line in [header] + body) for j in range(len(header))
    ]
    out = io.StringIO()
    for line in [header] + body:
        out.write(
            "  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip() + "\n"
        )
    return out.getvalue()


def _emit_markdown(table, precision, include_timing) -> str:
    metrics = _visible_metrics(table, include_timing)
    out = io.StringIO()
    out.write("| optimizer | " + " | ".join(metrics) + " |\n")
    out.write("|" + " --- |" * (len(metrics) + 1) + "\n")
    for row in table.rows:
        cells = [_cell(row, m, precision) for m in metrics]
        out.write("| " + " | ".join([row.optimizer] + cells) + " |\n")
    return out.getvalue()


def _emit_csv(table, precision, include_timing) -> str:
    metrics = _visible_metrics(table, include_timing)
    columns = ["optimizer", "replicates", "failures"]
    for m in metrics:
        columns += [f"{m}_mean", f"{m}_sd"]
    out = io.StringIO()
    out.write(",".join(columns) + "\n")
    for row in table.rows:
        cells = [row.optimizer, str(row.replicates), str(row.failures)]
        for m in metrics:
            if m in row.stats:
                mean, sd = row.stats[m]
                cells += [_fmt(mean, precision), _fmt(sd, precision)]
            else:
                cells += ["", ""]
        out.write(",".join(cells) + "\n")
    return out.getvalue()


def parse_csv_table(text: str) -> ResultTable:
    """Inverse of the CSV emitter (values at emitted precision)."""
    lines = [line for line in text.strip().splitlines() if line]
    header = lines[0].split(",")
    base = ("optimizer", "replicates", "failures")
    if tuple(header[:3]) != base or (len(header) - 3) % 2:
        raise ValueError("not an emitted result-table CSV")
    metrics = tuple(header[3 + 2 * i][: -len("_mean")] for i in range((len(header) - 3) // 2))
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        stats = {}
        for i, metric in enumerate(metrics):
            mean_s, sd_s = cells[3 + 2 * i], cells[4 + 2 * i]
            if mean_s:
                stats[metric] = (float(mean_s), float(sd_s))
        rows.append(
            TableRow(
                optimizer=cells[0],
                stats=stats,
                replicates=int(cells[1]),
                failures=int(cells[2]),
            )
        )
    return ResultTable(metrics=metrics, rows=tuple(rows))
