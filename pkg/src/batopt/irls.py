"""Iteratively reweighted least squares, used as a verification oracle.

Standard Fisher-scoring GLM fits for the same three families the
derivative-free path optimizes, converged to ``|step|_inf < 1e-10``.
Kept deliberately independent of the optimizer machinery so the two
routes can check each other.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from .fitting import EstimateReport, _wald_columns
from .glm import GlmDataset, glm_covariance, negloglik


class IrlsDivergence(RuntimeError):
    """IRLS failed to converge (separable or degenerate data)."""


def _working_quantities(family: str, eta, y):
    if family == "geometric":
        mu = np.exp(eta)
        w = mu / (1.0 + mu)  # equals 1 - pi
        z = eta + (y - mu) / mu
    elif family == "bernoulli":
        mu = expit(eta)
        w = mu * (1.0 - mu)
        z = eta + (y - mu) / w
    elif family == "poisson":
        mu = np.exp(eta)
        w = mu
        z = eta + (y - mu) / mu
    else:
        raise ValueError(f"unknown GLM family {family!r}")
    return w, z


def irls_oracle(
    data: GlmDataset,
    family: str,
    *,
    tol: float = 1e-10,
    max_iter: int = 100,
) -> EstimateReport:
    """Fisher-scoring fit of a GLM, with Wald summaries at convergence."""
    X, y = data.X, data.y
    beta = np.zeros(data.k)
    for _ in range(max_iter):
        eta = X @ beta
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            w, z = _working_quantities(family, eta, y)
        if not (np.isfinite(w).all() and np.isfinite(z).all()) or np.any(w <= 0.0):
            raise IrlsDivergence("non-finite working weights; data may be separable")
        A = X.T @ (w[:, None] * X)
        rhs = X.T @ (w * z)
        try:
            beta_new = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError as exc:
            raise IrlsDivergence(f"normal equations singular: {exc}") from None
        step = np.max(np.abs(beta_new - beta))
        beta = beta_new
        if step < tol:
            break
    else:
        raise IrlsDivergence(f"no convergence within {max_iter} iterations")

    covariance = glm_covariance(beta, data, family)
    se = np.sqrt(np.diag(covariance))
    or_rr, lo, hi = _wald_columns(beta, se)
    return EstimateReport(
        coef=beta,
        nll=float(negloglik(family)(beta, data)),
        covariance=covariance,
        se=se,
        or_rr=or_rr,
        ci_lower=lo,
        ci_upper=hi,
        status="ok",
        optimizer="irls",
        seed=0,
        evals=0,
    )
