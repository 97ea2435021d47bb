"""batopt: bat-algorithm-centered derivative-free optimization.

Swarm optimizers (bat, particle swarm, harmony search) over box search
spaces with reproducible seeded substreams, statistical likelihood
objectives (GLMs, constrained log-binomial and relative-risk regression,
Markov renewal partial likelihood, Hawkes processes), and a benchmark
harness that runs seeded multi-replicate comparisons.
"""

from .bat import BatParams, BatState, BatSwarm, bat_init, bat_run, bat_step
from .core import (
    INFEASIBLE,
    DimensionMismatch,
    ObjectiveSpec,
    RngStream,
    RunResult,
    SearchSpace,
    clamp_to_bounds,
    derive_seed,
    init_positions,
)
from .fitting import EstimateReport, fit_model
from .glm import (
    GLM_FAMILIES,
    GlmDataset,
    SingularInformation,
    bernoulli_negloglik,
    geometric_negloglik,
    glm_covariance,
    make_glm_objective,
    odds_ratio_ci,
    poisson_negloglik,
)
from .harmony import HsMemory, HsParams, hs_init, hs_run, hs_step
from .hawkes import (
    EventSequence,
    HawkesParams,
    hawkes_intensity,
    hawkes_negloglik,
    hawkes_negloglik_direct,
    l2_error,
    make_hawkes_objective,
    ogata_simulate,
)
from .irls import IrlsDivergence, irls_oracle
from .logbinomial import (
    GroupedBinomialDataset,
    logbinomial_penalized_nll,
    make_logbinomial_objective,
    relative_risk_negloglik,
)
from .multistate import (
    MultiStateDataset,
    make_multistate_objective,
    markov_renewal_neg_partial_lik,
    null_neg_partial_lik,
)
from .pso import PsoParams, PsoSwarm, pso_init, pso_run, pso_step
from .registry import (
    available_optimizers,
    get_optimizer,
    register_optimizer,
    run_optimizer,
)

__version__ = "0.1.0"
