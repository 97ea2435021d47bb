import math

import numpy as np
import pytest

from batopt import (
    GlmDataset,
    RngStream,
    SingularInformation,
    bernoulli_negloglik,
    geometric_negloglik,
    glm_covariance,
    make_glm_objective,
    odds_ratio_ci,
    poisson_negloglik,
)
from batopt.bench.datasets import synth_glm_dataset
from batopt.core import INFEASIBLE
from batopt.glm import (
    bernoulli_score,
    geometric_score,
    negloglik,
    poisson_score,
    score,
)
from batopt.irls import IrlsDivergence, irls_oracle

from oracles import finite_difference_gradient

LOG2 = math.log(2.0)


def intercept_only(y):
    y = np.asarray(y, dtype=float)
    return GlmDataset(np.ones((y.size, 1)), y)


class TestGeometric:
    def test_single_row_zero_count(self):
        assert geometric_negloglik(np.zeros(1), intercept_only([0])) == pytest.approx(
            LOG2, abs=1e-12
        )

    def test_single_row_one_count(self):
        assert geometric_negloglik(np.zeros(1), intercept_only([1])) == pytest.approx(
            2 * LOG2, abs=1e-12
        )

    def test_nonfinite_coefficients_are_infeasible(self):
        assert geometric_negloglik(np.array([np.nan]), intercept_only([1])) == INFEASIBLE

    def test_stable_for_extreme_predictors(self):
        data = intercept_only([3, 0, 2])
        assert np.isfinite(geometric_negloglik(np.array([500.0]), data))
        assert np.isfinite(geometric_negloglik(np.array([-500.0]), data))


class TestBernoulli:
    def test_symmetry_at_zero(self):
        assert bernoulli_negloglik(np.zeros(1), intercept_only([1])) == pytest.approx(LOG2)
        assert bernoulli_negloglik(np.zeros(1), intercept_only([0])) == pytest.approx(LOG2)

    def test_non_binary_response_rejected(self):
        with pytest.raises(ValueError, match="0 or 1"):
            bernoulli_negloglik(np.zeros(1), intercept_only([2]))

    def test_separable_data_has_no_finite_minimum(self):
        # Two perfectly separated points: pushing the slope out along the
        # separating direction decreases the loss forever.
        X = np.array([[1.0, -1.0], [1.0, 1.0]])
        data = GlmDataset(X, np.array([0.0, 1.0]))
        values = [
            bernoulli_negloglik(np.array([0.0, t]), data) for t in (0.0, 1.0, 5.0, 20.0)
        ]
        assert all(b < a for a, b in zip(values, values[1:]))


class TestPoisson:
    def test_zero_count_at_null(self):
        assert poisson_negloglik(np.zeros(1), intercept_only([0])) == pytest.approx(1.0)

    def test_hand_value(self):
        got = poisson_negloglik(np.array([LOG2]), intercept_only([2]))
        assert got == pytest.approx(2.0 - LOG2, abs=1e-12)

    def test_overflow_maps_to_sentinel(self):
        assert poisson_negloglik(np.array([800.0]), intercept_only([1])) == INFEASIBLE

    def test_log_factorial_via_gammaln(self):
        # One row, rate 1, count 10: nll = 1 + log(10!)
        got = poisson_negloglik(np.zeros(1), intercept_only([10]))
        assert got == pytest.approx(1.0 + math.log(math.factorial(10)), rel=1e-12)


class TestGradients:
    @pytest.mark.parametrize(
        "family,score_fn",
        [
            ("geometric", geometric_score),
            ("bernoulli", bernoulli_score),
            ("poisson", poisson_score),
        ],
    )
    def test_score_matches_finite_differences(self, family, score_fn):
        data = synth_glm_dataset(family, 80, [0.2, -0.4, 0.3], RngStream(5).child(0))
        nll = negloglik(family)
        gen = RngStream(6).generator()
        for _ in range(4):
            beta = gen.uniform(-0.8, 0.8, 3)
            analytic = score_fn(beta, data)
            numeric = finite_difference_gradient(lambda b: nll(b, data), beta)
            np.testing.assert_allclose(analytic, numeric, rtol=1e-6, atol=1e-8)

    def test_score_dispatcher(self):
        assert score("poisson") is poisson_score
        with pytest.raises(ValueError):
            score("gamma")


class TestCovariance:
    def test_geometric_intercept_only_closed_form(self):
        # At beta = 0 the success probability is 1/2, weights are 1/2,
        # so the variance is 2/n.
        n = 40
        data = intercept_only(np.zeros(n))
        cov = glm_covariance(np.zeros(1), data, "geometric")
        assert cov[0, 0] == pytest.approx(2.0 / n, rel=1e-12)

    def test_poisson_intercept_only_unit_weights(self):
        n = 25
        cov = glm_covariance(np.zeros(1), intercept_only(np.zeros(n)), "poisson")
        assert cov[0, 0] == pytest.approx(1.0 / n, rel=1e-12)

    def test_symmetric_positive_semidefinite(self):
        data = synth_glm_dataset("bernoulli", 120, [0.1, 0.5, -0.3], RngStream(9).child(0))
        cov = glm_covariance(np.array([0.1, 0.4, -0.2]), data, "bernoulli")
        np.testing.assert_allclose(cov, cov.T, atol=1e-14)
        assert np.all(np.linalg.eigvalsh(cov) > 0)

    def test_rank_deficiency_reported(self):
        X = np.ones((6, 2))  # second column duplicates the intercept
        data = GlmDataset(X, np.arange(6) % 2)
        with pytest.raises(SingularInformation, match="rank"):
            glm_covariance(np.zeros(2), data, "bernoulli")


class TestOddsRatioCi:
    def test_identity(self):
        assert odds_ratio_ci(0.0, 0.0) == (1.0, 1.0, 1.0)

    def test_published_rows_reproduce_at_two_decimals(self):
        or_, lo, hi = odds_ratio_ci(-0.138, 0.051)
        assert (round(or_, 2), round(lo, 2), round(hi, 2)) == (0.87, 0.79, 0.96)
        or_, lo, hi = odds_ratio_ci(1.143, 0.074)
        assert (round(or_, 2), round(lo, 2), round(hi, 2)) == (3.14, 2.71, 3.63)

    def test_interval_ordering(self):
        or_, lo, hi = odds_ratio_ci(0.3, 0.2)
        assert lo < or_ < hi

    def test_negative_se_rejected(self):
        with pytest.raises(ValueError):
            odds_ratio_ci(0.1, -0.01)

    def test_other_levels(self):
        _, lo95, hi95 = odds_ratio_ci(0.5, 0.1, level=0.95)
        _, lo99, hi99 = odds_ratio_ci(0.5, 0.1, level=0.99)
        assert lo99 < lo95 and hi99 > hi95


class TestIrlsOracle:
    def test_poisson_intercept_closed_form(self):
        y = np.array([1.0, 2.0, 0.0, 4.0, 3.0])
        report = irls_oracle(intercept_only(y), "poisson")
        assert report.coef[0] == pytest.approx(math.log(y.mean()), abs=1e-10)

    def test_bernoulli_intercept_closed_form(self):
        y = np.array([1.0, 1.0, 1.0, 0.0])
        report = irls_oracle(intercept_only(y), "bernoulli")
        assert report.coef[0] == pytest.approx(math.log(3.0), abs=1e-10)  # logit(3/4)

    def test_geometric_simulation_consistency(self):
        beta_true = np.array([0.2, -0.5, 0.3])
        data = synth_glm_dataset("geometric", 500, beta_true, RngStream(100).child(0))
        report = irls_oracle(data, "geometric")
        assert np.all(np.abs(report.coef - beta_true) < 3.0 * report.se)

    def test_separable_data_raises(self):
        X = np.column_stack([np.ones(6), np.array([-2.0, -1.5, -1.0, 1.0, 1.5, 2.0])])
        y = (X[:, 1] > 0).astype(float)
        with pytest.raises(IrlsDivergence):
            irls_oracle(GlmDataset(X, y), "bernoulli")

    def test_report_wald_columns(self):
        data = synth_glm_dataset("poisson", 200, [0.5, 0.2], RngStream(8).child(0))
        report = irls_oracle(data, "poisson")
        assert report.status == "ok"
        assert np.all(report.ci_lower < report.or_rr)
        assert np.all(report.or_rr < report.ci_upper)
        np.testing.assert_allclose(report.or_rr, np.exp(report.coef))


class TestDatasetValidation:
    def test_requires_intercept_column(self):
        with pytest.raises(ValueError, match="intercept"):
            GlmDataset(np.array([[2.0], [2.0]]), np.array([0.0, 1.0]))

    def test_rejects_negative_counts(self):
        with pytest.raises(ValueError):
            GlmDataset(np.ones((2, 1)), np.array([1.0, -1.0]))

    def test_rejects_fractional_counts(self):
        with pytest.raises(ValueError):
            GlmDataset(np.ones((2, 1)), np.array([0.5, 1.0]))

    def test_needs_enough_rows(self):
        with pytest.raises(ValueError):
            GlmDataset(np.ones((1, 2)), np.array([1.0]))

    def test_from_covariates_prepends_intercept(self):
        data = GlmDataset.from_covariates(np.array([1.0, 2.0, 3.0]), [0, 1, 0])
        assert data.k == 2
        np.testing.assert_array_equal(data.X[:, 0], np.ones(3))


class TestBatchEvaluator:
    @pytest.mark.parametrize("family", ["geometric", "bernoulli", "poisson"])
    def test_batch_matches_scalar(self, family):
        data = synth_glm_dataset(family, 60, [0.1, -0.2, 0.4], RngStream(77).child(0))
        objective = make_glm_objective(data, family)
        B = RngStream(78).generator().uniform(-2, 2, (9, 3))
        B[3, 1] = np.nan
        batch = objective.evaluate_many(B)
        loop = np.array([objective(b) for b in B])
        np.testing.assert_allclose(batch, loop)
        assert batch[3] == INFEASIBLE
