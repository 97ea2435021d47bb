"""Semi-Markov multi-state regression via a Cox-type partial likelihood.

Each record is one completed spell: a subject sits in ``from_state``,
leaves for ``to_state`` after a sojourn ``w > 0``, carrying a covariate
vector.  Per-transition baseline hazards are profiled out Breslow-style
on the sojourn-time scale: an observed transition out of state ``i`` at
sojourn ``w`` contributes ``b'z - log sum exp(b'z')`` over every spell
from state ``i`` whose sojourn is at least ``w`` (ties share the full
denominator).  With ``b = 0`` the value reduces to the sum of log
risk-set sizes.  Censoring is not modeled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import INFEASIBLE, Array, ObjectiveSpec, SearchSpace


class StateError(ValueError):
    """A record references an unknown or inconsistent state id."""


@dataclass(frozen=True)
class MultiStateDataset:
    """Completed sojourn records for a finite-state process.

    States are labeled ``1..n_states``; absorbing states simply never
    appear in ``from_state``.  ``Z`` holds one covariate row per record.
    """

    subject: Array
    from_state: Array
    to_state: Array
    sojourn: Array
    Z: Array
    n_states: int

    def __post_init__(self):
        subject = np.asarray(self.subject, dtype=np.int64)
        frm = np.asarray(self.from_state, dtype=np.int64)
        to = np.asarray(self.to_state, dtype=np.int64)
        w = np.asarray(self.sojourn, dtype=float)
        Z = np.atleast_2d(np.asarray(self.Z, dtype=float))
        if Z.shape[0] == 1 and frm.size != 1:
            Z = Z.T
        n = frm.size
        if not (subject.size == to.size == w.size == Z.shape[0] == n):
            raise ValueError("all record columns must have equal length")
        if n == 0:
            raise ValueError("dataset holds no transition records")
        r = int(self.n_states)
        if r < 2:
            raise StateError("need at least two states")
        for name, states in (("from_state", frm), ("to_state", to)):
            if np.any(states < 1) or np.any(states > r):
                raise StateError(f"{name} ids must lie in 1..{r}")
        if np.any(frm == to):
            raise StateError("self transitions are not allowed")
        if np.any(w <= 0.0) or not np.isfinite(w).all():
            raise ValueError("sojourn times must be positive and finite")
        if not np.isfinite(Z).all():
            raise ValueError("covariates must be finite")
        for arr in (subject, frm, to, w, Z):
            arr.setflags(write=False)
        object.__setattr__(self, "subject", subject)
        object.__setattr__(self, "from_state", frm)
        object.__setattr__(self, "to_state", to)
        object.__setattr__(self, "sojourn", w)
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "n_states", r)

    @property
    def n_records(self) -> int:
        return self.from_state.size

    @property
    def n_covariates(self) -> int:
        return self.Z.shape[1]


def _strata(data: MultiStateDataset):
    """Origin-state strata with sojourns pre-sorted ascending.

    Yields ``(record_indices_sorted, denominator_start)`` where
    ``denominator_start[j]`` is the first sorted position whose sojourn is
    >= the j-th record's sojourn (its Breslow risk set is the suffix from
    there).
    """
    out = []
    for state in np.unique(data.from_state):
        rows = np.flatnonzero(data.from_state == state)
        w = data.sojourn[rows]
        order = np.argsort(w, kind="stable")
        rows = rows[order]
        w = w[order]
        start = np.searchsorted(w, w, side="left")
        out.append((rows, start))
    return out


def markov_renewal_neg_partial_lik(beta: Array, data: MultiStateDataset) -> float:
    """Negative log partial likelihood of the transition regression."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (data.n_covariates,):
        raise ValueError(f"expected {data.n_covariates} coefficients, got {beta.shape}")
    if not np.isfinite(beta).all():
        return INFEASIBLE
    eta = data.Z @ beta
    total = 0.0
    for rows, start in _strata(data):
        if np.any(start >= rows.size):
            raise ValueError("empty risk set")
        e = eta[rows]
        # log of suffix sums of exp(eta) over the ascending-sojourn order
        suffix = np.logaddexp.accumulate(e[::-1])[::-1]
        total += float(np.sum(suffix[start] - e))
    return total


def _batch_neg_partial_lik(data: MultiStateDataset):
    strata = _strata(data)
    Z = data.Z

    def batch(B: Array) -> Array:
        eta = B @ Z.T  # (m, records)
        vals = np.zeros(B.shape[0])
        for rows, start in strata:
            e = eta[:, rows]
            suffix = np.logaddexp.accumulate(e[:, ::-1], axis=1)[:, ::-1]
            vals += np.sum(suffix[:, start] - e, axis=1)
        vals[~np.isfinite(B).all(axis=1)] = INFEASIBLE
        return vals

    return batch


def null_neg_partial_lik(data: MultiStateDataset) -> float:
    """Exact value at beta = 0: the sum of log risk-set sizes."""
    total = 0.0
    for rows, start in _strata(data):
        sizes = rows.size - start
        total += float(np.sum(np.log(sizes)))
    return total


def make_multistate_objective(
    data: MultiStateDataset, bounds: tuple[float, float] = (-10.0, 10.0)
) -> ObjectiveSpec:
    space = SearchSpace.box(bounds[0], bounds[1], data.n_covariates)
    return ObjectiveSpec(
        space=space,
        evaluate=lambda b: markov_renewal_neg_partial_lik(b, data),
        batch=_batch_neg_partial_lik(data),
        name="markov-renewal",
    )
