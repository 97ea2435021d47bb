"""CSV dataset loading, bundled data, and synthetic generators.

Schemas (header row required, comma separated):

- ``glm``: ``y,x1..xk`` — integer response and raw covariates; an
  intercept column is prepended automatically.
- ``grouped-binomial``: ``y,m,x1..xk`` — events, group size, covariates;
  intercept prepended.
- ``events``: a ``# T=<horizon>`` comment line, then header ``t`` and one
  event time per row (this is also the serialization format for
  simulated sequences).
- ``multistate``: ``id,from,to,sojourn,z1..zp`` — one completed spell per
  row; the number of states is inferred from the largest id seen.

Three grouped-binomial example datasets ship with the package under the
names ``williamson-boundary``, ``williamson-infinity`` and
``williamson-interior``; their constrained optima sit on the constraint
boundary, at the box edge, and in the interior respectively.
"""

from __future__ import annotations

import csv
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.special import expit

from ..core import RngStream
from ..glm import GlmDataset
from ..hawkes import EventSequence, HawkesParams, ogata_simulate
from ..logbinomial import GroupedBinomialDataset
from ..multistate import MultiStateDataset

SCHEMAS = ("glm", "grouped-binomial", "events", "multistate")

BUILTIN_DATASETS = {
    "williamson-boundary": "williamson_boundary.csv",
    "williamson-infinity": "williamson_infinity.csv",
    "williamson-interior": "williamson_interior.csv",
}


class DatasetError(ValueError):
    """A dataset file is malformed or violates its schema."""


def builtin_dataset_path(name: str) -> Path:
    try:
        filename = BUILTIN_DATASETS[name]
    except KeyError:
        known = ", ".join(sorted(BUILTIN_DATASETS))
        raise DatasetError(f"unknown bundled dataset {name!r} (have: {known})") from None
    return Path(str(resources.files(__package__).joinpath("data", filename)))


def _read_rows(path: Path) -> tuple[list[str], list[list[str]], dict[str, str]]:
    """Header, data rows, and ``# key=value`` comment metadata."""
    meta: dict[str, str] = {}
    header: list[str] | None = None
    rows: list[list[str]] = []
    with open(path, newline="") as fh:
        for raw in csv.reader(fh):
            if not raw or all(not c.strip() for c in raw):
                continue
            if raw[0].lstrip().startswith("#"):
                text = ",".join(raw).lstrip()[1:].strip()
                if "=" in text:
                    key, _, value = text.partition("=")
                    meta[key.strip()] = value.strip()
                continue
            if header is None:
                header = [c.strip() for c in raw]
            else:
                rows.append([c.strip() for c in raw])
    if header is None:
        raise DatasetError(f"{path}: empty file")
    return header, rows, meta


def _parse_cell(value: str, row: int, column: str, path) -> float:
    try:
        return float(value)
    except ValueError:
        raise DatasetError(
            f"{path}: malformed numeric cell at data row {row}, column {column!r}: {value!r}"
        ) from None


def _matrix(header, rows, path) -> np.ndarray:
    out = np.empty((len(rows), len(header)))
    for i, row in enumerate(rows, start=1):
        if len(row) != len(header):
            raise DatasetError(
                f"{path}: data row {i} has {len(row)} cells, expected {len(header)}"
            )
        for j, cell in enumerate(row):
            out[i - 1, j] = _parse_cell(cell, i, header[j], path)
    return out


def _expect_columns(header, prefix_names, path):
    lowered = [h.lower() for h in header]
    if lowered[: len(prefix_names)] != list(prefix_names):
        raise DatasetError(
            f"{path}: header {header} does not start with {list(prefix_names)}"
        )


def _report(kind: str, detail: str, path, quiet: bool) -> None:
    if not quiet:
        print(f"loaded {kind} dataset from {path}: {detail}")


def load_glm_csv(path, quiet: bool = False) -> GlmDataset:
    path = Path(path)
    header, rows, _ = _read_rows(path)
    _expect_columns(header, ("y",), path)
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    values = _matrix(header, rows, path)
    try:
        data = GlmDataset.from_covariates(values[:, 1:], values[:, 0])
    except ValueError as exc:
        raise DatasetError(f"{path}: {exc}") from None
    _report("glm", f"{data.n} rows, {data.k - 1} covariates (+intercept)", path, quiet)
    return data


def load_grouped_binomial_csv(path, quiet: bool = False) -> GroupedBinomialDataset:
    path = Path(path)
    header, rows, _ = _read_rows(path)
    _expect_columns(header, ("y", "m"), path)
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    values = _matrix(header, rows, path)
    try:
        data = GroupedBinomialDataset.from_covariates(
            values[:, 2:], values[:, 1], values[:, 0]
        )
    except ValueError as exc:
        raise DatasetError(f"{path}: {exc}") from None
    _report(
        "grouped-binomial",
        f"{data.n} groups, {data.k - 1} covariates (+intercept)",
        path,
        quiet,
    )
    return data


def load_events_csv(path, quiet: bool = False) -> EventSequence:
    path = Path(path)
    header, rows, meta = _read_rows(path)
    _expect_columns(header, ("t",), path)
    if "T" not in meta:
        raise DatasetError(f"{path}: missing '# T=<horizon>' header line")
    horizon = _parse_cell(meta["T"], 0, "T", path)
    times = _matrix(header, rows, path)[:, 0] if rows else np.empty(0)
    try:
        events = EventSequence(times, horizon)
    except ValueError as exc:
        raise DatasetError(f"{path}: {exc}") from None
    _report("events", f"{len(events)} events on (0, {horizon:g}]", path, quiet)
    return events


def save_events_csv(path, events: EventSequence) -> None:
    """Serialize an event sequence in the ``events`` schema."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write(f"# T={float(events.horizon)!r}\n")
        fh.write("t\n")
        for t in events.times:
            fh.write(f"{float(t)!r}\n")


def load_multistate_csv(path, quiet: bool = False) -> MultiStateDataset:
    path = Path(path)
    header, rows, _ = _read_rows(path)
    _expect_columns(header, ("id", "from", "to", "sojourn"), path)
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    values = _matrix(header, rows, path)
    n_states = int(max(values[:, 1].max(), values[:, 2].max()))
    try:
        data = MultiStateDataset(
            subject=values[:, 0],
            from_state=values[:, 1],
            to_state=values[:, 2],
            sojourn=values[:, 3],
            Z=values[:, 4:],
            n_states=n_states,
        )
    except ValueError as exc:
        raise DatasetError(f"{path}: {exc}") from None
    _report(
        "multistate",
        f"{data.n_records} spells, {data.n_states} states, "
        f"{data.n_covariates} covariates",
        path,
        quiet,
    )
    return data


_LOADERS = {
    "glm": load_glm_csv,
    "grouped-binomial": load_grouped_binomial_csv,
    "events": load_events_csv,
    "multistate": load_multistate_csv,
}


def load_csv_dataset(path, schema: str, quiet: bool = False):
    """Load and validate a dataset file against one of the schemas.

    ``path`` may also be a bundled dataset name.  Prints a one-line
    row-count and column report unless ``quiet``.
    """
    if schema not in _LOADERS:
        raise DatasetError(f"unknown schema {schema!r} (have: {', '.join(SCHEMAS)})")
    if isinstance(path, str) and path in BUILTIN_DATASETS:
        path = builtin_dataset_path(path)
    return _LOADERS[schema](path, quiet=quiet)


# ---------------------------------------------------------------------------
# Synthetic generators (used by the config surface and the test oracles)


def synth_glm_dataset(family: str, n: int, beta, stream: RngStream) -> GlmDataset:
    """Simulate a GLM dataset with standard-normal covariates.

    ``beta`` includes the intercept; the design gets ``len(beta) - 1``
    covariate columns.
    """
    beta = np.asarray(beta, dtype=float)
    if beta.ndim != 1 or beta.size < 1:
        raise ValueError("beta must be a non-empty coefficient vector")
    gen = stream.generator()
    X = np.column_stack([np.ones(n), gen.standard_normal((n, beta.size - 1))])
    eta = X @ beta
    if family == "geometric":
        pi = expit(-eta)
        y = gen.geometric(pi) - 1  # failures before the first success
    elif family == "bernoulli":
        y = (gen.random(n) < expit(eta)).astype(float)
    elif family == "poisson":
        y = gen.poisson(np.exp(eta)).astype(float)
    else:
        raise ValueError(f"unknown GLM family {family!r}")
    return GlmDataset(X, y)


def synth_two_state_dataset(
    n_individuals: int, beta: float, stream: RngStream
) -> MultiStateDataset:
    """Two-state exponential sojourn data with one binary covariate.

    Everyone starts in state 1 and moves to the absorbing state 2 after
    an exponential sojourn with hazard ``exp(beta * z)``, ``z`` balanced
    0/1 across individuals.
    """
    if n_individuals < 2:
        raise ValueError("need at least two individuals")
    gen = stream.generator()
    z = np.arange(n_individuals) % 2
    sojourn = gen.exponential(np.exp(-float(beta) * z))
    return MultiStateDataset(
        subject=np.arange(n_individuals),
        from_state=np.ones(n_individuals, dtype=int),
        to_state=np.full(n_individuals, 2, dtype=int),
        sojourn=sojourn,
        Z=z.astype(float)[:, None],
        n_states=2,
    )


def synth_hawkes_events(
    truth: HawkesParams, horizon: float, stream: RngStream
) -> EventSequence:
    return ogata_simulate(truth, horizon, stream)
