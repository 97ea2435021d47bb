"""Model fitting through the optimizer registry, with Wald post-processing.

``fit_model`` runs a registered derivative-free optimizer on a likelihood
objective and assembles an estimate report: coefficients, the observed
information covariance (GLM families), Wald standard errors, and
exponentiated coefficients with 95% intervals.  Log-binomial fits are
projected along the intercept onto the admissible set so every reported
estimate satisfies the ``x'b <= 0`` constraints.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Array, RunResult
from .glm import (
    GLM_FAMILIES,
    GlmDataset,
    SingularInformation,
    glm_covariance,
    make_glm_objective,
    negloglik,
    odds_ratio_ci,
)
from .logbinomial import (
    DEFAULT_PENALTY_WEIGHT,
    GroupedBinomialDataset,
    logbinomial_penalized_nll,
    make_logbinomial_objective,
    max_linear_predictor,
)
from .registry import get_optimizer

LOGBINOMIAL_FAMILIES = ("logbinomial", "relative-risk")
_BOUNDARY_MARGIN = 1e-6


@dataclass(frozen=True)
class EstimateReport:
    """Fitted coefficients and Wald inference summaries.

    ``covariance`` and the derived columns are ``None`` when the estimate
    sits on a boundary or the information matrix is singular; ``status``
    is ``"ok"``, ``"boundary"`` or ``"degenerate"`` accordingly.
    """

    coef: Array
    nll: float
    covariance: Optional[Array]
    se: Optional[Array]
    or_rr: Optional[Array]
    ci_lower: Optional[Array]
    ci_upper: Optional[Array]
    status: str
    optimizer: str
    seed: int
    evals: int


def _wald_columns(coef: Array, se: Array):
    triples = [odds_ratio_ci(c, s) for c, s in zip(coef, se)]
    or_rr = np.array([t[0] for t in triples])
    lo = np.array([t[1] for t in triples])
    hi = np.array([t[2] for t in triples])
    return or_rr, lo, hi


def _near_box_edge(coef: Array, bounds: tuple[float, float]) -> bool:
    lo, hi = bounds
    return bool(
        np.any(np.abs(coef - lo) < _BOUNDARY_MARGIN)
        or np.any(np.abs(coef - hi) < _BOUNDARY_MARGIN)
    )


def _glm_report(result: RunResult, data: GlmDataset, family: str,
                bounds: tuple[float, float], optimizer: str) -> EstimateReport:
    coef = np.asarray(result.best_x, dtype=float).copy()
    status = "boundary" if _near_box_edge(coef, bounds) else "ok"
    covariance = se = or_rr = lo = hi = None
    if status == "ok":
        # Wald inference is meaningless at a box edge, so only interior
        # estimates get covariance-based columns.
        try:
            covariance = glm_covariance(coef, data, family)
            diag = np.diag(covariance)
            if np.any(diag < 0.0):
                raise SingularInformation("negative variance estimate")
            se = np.sqrt(diag)
            or_rr, lo, hi = _wald_columns(coef, se)
        except SingularInformation:
            covariance = se = or_rr = lo = hi = None
            status = "degenerate"
    return EstimateReport(
        coef=coef,
        nll=float(negloglik(family)(coef, data)),
        covariance=covariance,
        se=se,
        or_rr=or_rr,
        ci_lower=lo,
        ci_upper=hi,
        status=status,
        optimizer=optimizer,
        seed=result.seed,
        evals=result.evals,
    )


def _logbinomial_report(result: RunResult, data: GroupedBinomialDataset,
                        penalty_weight: float, bounds: tuple[float, float],
                        optimizer: str) -> EstimateReport:
    coef = np.asarray(result.best_x, dtype=float).copy()
    # Project onto the admissible set along the intercept: shifting the
    # intercept by the worst violation makes every x'b non-positive.
    worst = max_linear_predictor(coef, data)
    if worst > 0.0:
        coef[0] -= worst
    on_constraint = max_linear_predictor(coef, data) > -_BOUNDARY_MARGIN
    status = "boundary" if on_constraint or _near_box_edge(coef, bounds) else "ok"
    return EstimateReport(
        coef=coef,
        nll=float(logbinomial_penalized_nll(coef, data, penalty_weight)),
        covariance=None,
        se=None,
        or_rr=np.exp(coef),
        ci_lower=None,
        ci_upper=None,
        status=status,
        optimizer=optimizer,
        seed=result.seed,
        evals=result.evals,
    )


def fit_model(
    data,
    family: str,
    optimizer: str = "bat",
    *,
    seed: int,
    bounds: tuple[float, float] = (-10.0, 10.0),
    iterations: int | None = 2000,
    swarm: int | None = 20,
    penalty_weight: float = DEFAULT_PENALTY_WEIGHT,
    **optimizer_params,
) -> EstimateReport:
    """Maximize a likelihood with a registered optimizer and summarize.

    ``family`` selects the objective: one of the GLM families
    (``geometric``, ``bernoulli``, ``poisson``) on a :class:`GlmDataset`,
    or ``logbinomial`` / ``relative-risk`` on a
    :class:`GroupedBinomialDataset`.  The default budget (20 agents, 2000
    iterations) suits smooth low-dimensional fits; pass ``swarm`` and
    ``iterations`` to override.
    """
    if family in GLM_FAMILIES:
        if not isinstance(data, GlmDataset):
            raise TypeError("GLM families require a GlmDataset")
        objective = make_glm_objective(data, family, bounds)
    elif family in LOGBINOMIAL_FAMILIES:
        if not isinstance(data, GroupedBinomialDataset):
            raise TypeError("log-binomial families require a GroupedBinomialDataset")
        objective = make_logbinomial_objective(data, bounds, penalty_weight)
    else:
        raise ValueError(f"unknown model family {family!r}")

    runner = get_optimizer(optimizer)
    result = runner(
        objective, seed, iterations=iterations, swarm=swarm, **optimizer_params
    )

    if family in GLM_FAMILIES:
        return _glm_report(result, data, family, bounds, optimizer)
    return _logbinomial_report(result, data, penalty_weight, bounds, optimizer)
