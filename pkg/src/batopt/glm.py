"""Negative log-likelihoods for geometric, logistic and Poisson regression.

All three models share the design-matrix dataset and are exposed both as
plain functions of the coefficient vector (for optimizers) and with
analytic score vectors (verified against finite differences in the test
suite).  The geometric model uses a log link on the mean, so the success
probability is ``pi = 1 / (1 + exp(x'b))``; the logistic model is the
standard Bernoulli logit fit; the Poisson model uses a log link with the
``log y!`` constant included via the log-gamma function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, gammaln, ndtri

from .core import INFEASIBLE, Array, ObjectiveSpec, SearchSpace

GLM_FAMILIES = ("geometric", "bernoulli", "poisson")


class SingularInformation(ValueError):
    """The weighted information matrix is rank deficient."""


@dataclass(frozen=True)
class GlmDataset:
    """Design matrix with an explicit intercept column and responses.

    ``y`` holds non-negative integer counts (geometric, Poisson) or 0/1
    indicators (Bernoulli).  The first column of ``X`` must be all ones.
    """

    X: Array
    y: Array

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2:
            raise ValueError("X must be a 2-d design matrix")
        if y.shape != (X.shape[0],):
            raise ValueError("y must have one entry per design row")
        if X.shape[0] < X.shape[1]:
            raise ValueError("need at least as many rows as coefficients")
        if not np.all(X[:, 0] == 1.0):
            raise ValueError("first design column must be the intercept (all ones)")
        if np.any(y < 0) or np.any(y != np.round(y)):
            raise ValueError("responses must be non-negative integers")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_covariates(cls, covariates: Array, y: Array) -> "GlmDataset":
        """Prepend an intercept column to raw covariates."""
        Z = np.atleast_2d(np.asarray(covariates, dtype=float))
        if Z.shape[0] == 1 and np.asarray(y).size != 1:
            Z = Z.T
        return cls(np.column_stack([np.ones(Z.shape[0]), Z]), y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def k(self) -> int:
        return self.X.shape[1]


def _predictor(beta: Array, data: GlmDataset) -> Array | None:
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (data.k,):
        raise ValueError(f"expected {data.k} coefficients, got {beta.shape}")
    if not np.isfinite(beta).all():
        return None
    return data.X @ beta


def _check_binary(data: GlmDataset) -> None:
    if np.any((data.y != 0.0) & (data.y != 1.0)):
        raise ValueError("Bernoulli responses must be 0 or 1")


def geometric_negloglik(beta: Array, data: GlmDataset) -> float:
    """Negative log-likelihood of the geometric count model.

    Each count follows Geometric(pi_i) with pi_i = 1 / (1 + exp(eta_i)),
    giving per-row log-likelihood ``y*eta - (y + 1)*log(1 + exp(eta))``.
    Computed with log-sum-exp stabilization; non-finite coefficients map
    to the infeasible sentinel.
    """
    eta = _predictor(beta, data)
    if eta is None:
        return INFEASIBLE
    y = data.y
    return float(np.sum((y + 1.0) * np.logaddexp(0.0, eta) - y * eta))


def geometric_score(beta: Array, data: GlmDataset) -> Array:
    """Gradient of :func:`geometric_negloglik`."""
    eta = _predictor(beta, data)
    if eta is None:
        raise ValueError("score undefined for non-finite coefficients")
    return data.X.T @ ((data.y + 1.0) * expit(eta) - data.y)


def bernoulli_negloglik(beta: Array, data: GlmDataset) -> float:
    """Standard logistic negative log-likelihood for 0/1 responses."""
    _check_binary(data)
    eta = _predictor(beta, data)
    if eta is None:
        return INFEASIBLE
    return float(np.sum(np.logaddexp(0.0, eta) - data.y * eta))


def bernoulli_score(beta: Array, data: GlmDataset) -> Array:
    _check_binary(data)
    eta = _predictor(beta, data)
    if eta is None:
        raise ValueError("score undefined for non-finite coefficients")
    return data.X.T @ (expit(eta) - data.y)


def poisson_negloglik(beta: Array, data: GlmDataset) -> float:
    """Poisson log-link negative log-likelihood, with the ``log y!`` term."""
    eta = _predictor(beta, data)
    if eta is None:
        return INFEASIBLE
    with np.errstate(over="ignore"):
        value = np.sum(np.exp(eta) + gammaln(data.y + 1.0) - data.y * eta)
    return float(value) if np.isfinite(value) else INFEASIBLE


def poisson_score(beta: Array, data: GlmDataset) -> Array:
    eta = _predictor(beta, data)
    if eta is None:
        raise ValueError("score undefined for non-finite coefficients")
    with np.errstate(over="ignore"):
        return data.X.T @ (np.exp(eta) - data.y)


def negloglik(family: str):
    """Dispatch a family name to its negative log-likelihood function."""
    try:
        return {
            "geometric": geometric_negloglik,
            "bernoulli": bernoulli_negloglik,
            "poisson": poisson_negloglik,
        }[family]
    except KeyError:
        raise ValueError(f"unknown GLM family {family!r}") from None


def score(family: str):
    try:
        return {
            "geometric": geometric_score,
            "bernoulli": bernoulli_score,
            "poisson": poisson_score,
        }[family]
    except KeyError:
        raise ValueError(f"unknown GLM family {family!r}") from None


def glm_weights(beta: Array, data: GlmDataset, family: str) -> Array:
    """Diagonal Fisher-information weights at ``beta``.

    geometric: ``1 - pi``; Bernoulli: ``pi (1 - pi)``; Poisson: ``lambda``.
    """
    eta = _predictor(beta, data)
    if eta is None:
        raise ValueError("weights undefined for non-finite coefficients")
    if family == "geometric":
        return expit(eta)  # equals 1 - pi for pi = 1 / (1 + e^eta)
    if family == "bernoulli":
        p = expit(eta)
        return p * (1.0 - p)
    if family == "poisson":
        with np.errstate(over="ignore"):
            return np.exp(eta)
    raise ValueError(f"unknown GLM family {family!r}")


def glm_covariance(beta_hat: Array, data: GlmDataset, family: str) -> Array:
    """Inverse weighted information ``(X' W X)^{-1}``, symmetrized.

    Raises :class:`SingularInformation` when the weighted design is rank
    deficient (separable or degenerate data).
    """
    w = glm_weights(beta_hat, data, family)
    if not np.isfinite(w).all():
        raise SingularInformation("non-finite information weights")
    info = data.X.T @ (w[:, None] * data.X)
    rank = np.linalg.matrix_rank(info)
    if rank < data.k:
        raise SingularInformation(
            f"information matrix has rank {rank} < {data.k}"
        )
    try:
        cov = np.linalg.inv(info)
    except np.linalg.LinAlgError as exc:
        raise SingularInformation(str(exc)) from None
    return (cov + cov.T) / 2.0


def odds_ratio_ci(
    coef: float, se: float, level: float = 0.95
) -> tuple[float, float, float]:
    """Wald interval for an exponentiated coefficient.

    Returns ``(exp(coef), lower, upper)``.  The default 95% level uses the
    conventional 1.96 multiplier.
    """
    if se < 0.0:
        raise ValueError("standard error cannot be negative")
    if not 0.0 < level < 1.0:
        raise ValueError("confidence level must lie in (0, 1)")
    z = 1.96 if level == 0.95 else float(ndtri(0.5 + level / 2.0))
    return (
        float(np.exp(coef)),
        float(np.exp(coef - z * se)),
        float(np.exp(coef + z * se)),
    )


def _batch_evaluator(data: GlmDataset, family: str):
    X, y = data.X, data.y
    if family == "bernoulli":
        _check_binary(data)

    def batch(B: Array) -> Array:
        eta = B @ X.T  # (m, n)
        bad = ~np.isfinite(B).all(axis=1)
        with np.errstate(over="ignore", invalid="ignore"):
            if family == "geometric":
                vals = np.sum((y + 1.0) * np.logaddexp(0.0, eta) - y * eta, axis=1)
            elif family == "bernoulli":
                vals = np.sum(np.logaddexp(0.0, eta) - y * eta, axis=1)
            else:
                vals = np.sum(np.exp(eta) + gammaln(y + 1.0) - y * eta, axis=1)
        vals = np.where(np.isfinite(vals), vals, INFEASIBLE)
        vals[bad] = INFEASIBLE
        return vals

    return batch


def make_glm_objective(
    data: GlmDataset, family: str, bounds: tuple[float, float] = (-10.0, 10.0)
) -> ObjectiveSpec:
    """Wrap a family's negative log-likelihood as a boxed objective."""
    fn = negloglik(family)
    space = SearchSpace.box(bounds[0], bounds[1], data.k)
    return ObjectiveSpec(
        space=space,
        evaluate=lambda beta: fn(beta, data),
        batch=_batch_evaluator(data, family),
        name=f"glm-{family}",
    )
