"""Constrained log-binomial / relative-risk likelihood with a hinge penalty.

The model puts ``log p = x'b`` on grouped binomial outcomes, so every row
imposes the linear constraint ``x'b <= 0``.  The estimation objective is
the penalized unconstrained form

    nll(b) = -loglik(b at the projected point) + w * sum max(0, x'b)^2

where rows pushed beyond the constraint are evaluated at their boundary
limit.  A saturated row (``y = m``) has limit 0 there, so optima that sit
exactly on the constraint stay finite and reachable; a non-saturated row
has log-likelihood diverging to -inf at the boundary, so any violation on
such a row returns the infeasible sentinel instead (never NaN).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import INFEASIBLE, Array, ObjectiveSpec, SearchSpace

DEFAULT_PENALTY_WEIGHT = 1e4


@dataclass(frozen=True)
class GroupedBinomialDataset:
    """Groups of ``m`` subjects with ``y`` events and shared covariates ``X``.

    The first column of ``X`` must be the intercept (all ones).
    """

    X: Array
    m: Array
    y: Array

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        m = np.asarray(self.m)
        y = np.asarray(self.y)
        if X.ndim != 2:
            raise ValueError("X must be a 2-d covariate matrix")
        if m.shape != (X.shape[0],) or y.shape != (X.shape[0],):
            raise ValueError("m and y must have one entry per group")
        if np.any(m != np.round(m)) or np.any(y != np.round(y)):
            raise ValueError("group sizes and event counts must be integers")
        m = m.astype(np.int64)
        y = y.astype(np.int64)
        if np.any(m < 1):
            raise ValueError("every group must contain at least one subject")
        if np.any(y < 0) or np.any(y > m):
            raise ValueError("event counts must satisfy 0 <= y <= m")
        if not np.all(X[:, 0] == 1.0):
            raise ValueError("first covariate column must be the intercept (all ones)")
        X.setflags(write=False)
        m.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_covariates(cls, covariates, m, y) -> "GroupedBinomialDataset":
        Z = np.atleast_2d(np.asarray(covariates, dtype=float))
        if Z.shape[0] == 1 and np.asarray(m).size != 1:
            Z = Z.T
        return cls(np.column_stack([np.ones(Z.shape[0]), Z]), m, y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def k(self) -> int:
        return self.X.shape[1]


def _penalized_values(U: Array, data: GroupedBinomialDataset, weight: float) -> Array:
    """Vectorized penalized negative log-likelihood over rows of predictors.

    ``U`` has shape (batch, groups): linear predictors x'b for each
    candidate coefficient vector.
    """
    m = data.m
    y = data.y
    neg = U < 0.0
    # log(1 - e^u) evaluated as log(-expm1(u)); defined only for u < 0.
    with np.errstate(divide="ignore"):
        log_tail = np.log(-np.expm1(np.where(neg, U, -1.0)))
    contrib = np.where(neg, y * U + (m - y) * log_tail, 0.0)
    infeasible_cell = (~neg) & (y < m)
    nll = -np.sum(contrib, axis=1) + weight * np.sum(np.maximum(U, 0.0) ** 2, axis=1)
    nll[infeasible_cell.any(axis=1)] = INFEASIBLE
    return nll


def logbinomial_penalized_nll(
    beta: Array,
    data: GroupedBinomialDataset,
    penalty_weight: float = DEFAULT_PENALTY_WEIGHT,
) -> float:
    """Penalized negative log-likelihood of the log-binomial model.

    Admissible points (all ``x'b <= 0``) return the exact negative
    log-likelihood, with saturated rows contributing 0 at the boundary.
    Inadmissible points add ``penalty_weight * sum max(0, x'b)^2``; a
    violated non-saturated row returns the infeasible sentinel.
    """
    if penalty_weight <= 0.0:
        raise ValueError("penalty weight must be positive")
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (data.k,):
        raise ValueError(f"expected {data.k} coefficients, got {beta.shape}")
    if not np.isfinite(beta).all():
        return INFEASIBLE
    U = (data.X @ beta)[None, :]
    return float(_penalized_values(U, data, penalty_weight)[0])


def relative_risk_negloglik(
    alpha: Array,
    data: GroupedBinomialDataset,
    penalty_weight: float = DEFAULT_PENALTY_WEIGHT,
) -> float:
    """Relative-risk regression objective: ``p = exp(x'a)`` per group.

    Identical evaluation core to :func:`logbinomial_penalized_nll`; the
    exponentiated coefficients are risk ratios.
    """
    return logbinomial_penalized_nll(alpha, data, penalty_weight)


def relative_risk_score(alpha: Array, data: GroupedBinomialDataset) -> Array:
    """Gradient of the (unpenalized) objective at strictly admissible points."""
    alpha = np.asarray(alpha, dtype=float)
    u = data.X @ alpha
    if np.any(u >= 0.0):
        raise ValueError("score defined only where every x'a is strictly negative")
    eu = np.exp(u)
    du = (data.m - data.y) * eu / (1.0 - eu) - data.y
    return data.X.T @ du


def max_linear_predictor(beta: Array, data: GroupedBinomialDataset) -> float:
    """Largest ``x'b`` across groups; admissibility means this is <= 0."""
    return float(np.max(data.X @ np.asarray(beta, dtype=float)))


def make_logbinomial_objective(
    data: GroupedBinomialDataset,
    bounds: tuple[float, float] = (-10.0, 10.0),
    penalty_weight: float = DEFAULT_PENALTY_WEIGHT,
) -> ObjectiveSpec:
    if penalty_weight <= 0.0:
        raise ValueError("penalty weight must be positive")
    space = SearchSpace.box(bounds[0], bounds[1], data.k)
    X = data.X

    def batch(B: Array) -> Array:
        vals = _penalized_values(B @ X.T, data, penalty_weight)
        vals[~np.isfinite(B).all(axis=1)] = INFEASIBLE
        return vals

    return ObjectiveSpec(
        space=space,
        evaluate=lambda b: logbinomial_penalized_nll(b, data, penalty_weight),
        batch=batch,
        name="logbinomial",
    )
