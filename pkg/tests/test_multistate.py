import math

import numpy as np
import pytest

from batopt import (
    BatParams,
    MultiStateDataset,
    RngStream,
    bat_run,
    make_multistate_objective,
    markov_renewal_neg_partial_lik,
    null_neg_partial_lik,
)
from batopt.bench.datasets import synth_two_state_dataset
from batopt.core import INFEASIBLE
from batopt.multistate import StateError

from oracles import cox_nll_brute, newton_cox_fit


def simple_dataset(sojourns, z, to_state=2):
    n = len(sojourns)
    return MultiStateDataset(
        subject=np.arange(n),
        from_state=np.ones(n, dtype=int),
        to_state=np.full(n, to_state, dtype=int),
        sojourn=np.asarray(sojourns, dtype=float),
        Z=np.asarray(z, dtype=float).reshape(n, -1),
        n_states=max(2, to_state),
    )


class TestNullValue:
    def test_distinct_times_give_log_factorial(self):
        data = simple_dataset([1.0, 2.0, 3.0, 4.0, 5.0], np.zeros(5))
        expected = sum(math.log(k) for k in range(1, 6))
        assert markov_renewal_neg_partial_lik(np.zeros(1), data) == pytest.approx(
            expected, abs=1e-12
        )
        assert null_neg_partial_lik(data) == pytest.approx(expected, abs=1e-12)

    def test_tied_times_share_the_full_risk_set(self):
        data = simple_dataset([1.0, 1.0, 2.0], np.zeros(3))
        # Both sojourns at 1 see all three spells at risk; the longest
        # spell is alone.
        expected = 2 * math.log(3.0)
        assert markov_renewal_neg_partial_lik(np.zeros(1), data) == pytest.approx(expected)
        assert null_neg_partial_lik(data) == pytest.approx(expected)

    def test_single_spell_contributes_zero(self):
        data = simple_dataset([2.5], [1.0])
        for beta in (-1.0, 0.0, 2.0):
            assert markov_renewal_neg_partial_lik(np.array([beta]), data) == 0.0


class TestAgainstBruteForce:
    def test_matches_double_loop_oracle(self):
        gen = RngStream(8).generator()
        w = gen.exponential(1.0, 12)
        z = gen.normal(size=(12, 2))
        data = MultiStateDataset(
            subject=np.arange(12),
            from_state=np.ones(12, dtype=int),
            to_state=np.full(12, 2, dtype=int),
            sojourn=w,
            Z=z,
            n_states=2,
        )
        for _ in range(5):
            beta = gen.normal(size=2)
            fast = markov_renewal_neg_partial_lik(beta, data)
            slow = cox_nll_brute(beta, w, z)
            assert fast == pytest.approx(slow, rel=1e-12)

    def test_strata_decompose_by_origin_state(self):
        gen = RngStream(9).generator()
        w = gen.exponential(1.0, 10)
        z = gen.normal(size=10)
        frm = np.array([1] * 6 + [2] * 4)
        to = np.array([2] * 6 + [3] * 4)
        data = MultiStateDataset(
            subject=np.arange(10),
            from_state=frm,
            to_state=to,
            sojourn=w,
            Z=z[:, None],
            n_states=3,
        )
        beta = np.array([0.4])
        whole = markov_renewal_neg_partial_lik(beta, data)
        parts = cox_nll_brute(beta, w[:6], z[:6, None]) + cox_nll_brute(
            beta, w[6:], z[6:, None]
        )
        assert whole == pytest.approx(parts, rel=1e-12)

    def test_optimizer_recovers_newton_solution(self):
        data = synth_two_state_dataset(50, 0.5, RngStream(42).child(0))
        beta_hat, nll_hat = newton_cox_fit(data.sojourn, data.Z)
        objective = make_multistate_objective(data)
        result = bat_run(objective, BatParams(n=30, T=400), seed=3)
        assert result.best_f == pytest.approx(nll_hat, abs=1e-3)
        assert abs(result.best_x[0] - beta_hat[0]) < 0.02


class TestValidationAndEdges:
    def test_unknown_state_rejected(self):
        with pytest.raises(StateError):
            MultiStateDataset(
                subject=[0],
                from_state=[1],
                to_state=[7],  # beyond n_states
                sojourn=[1.0],
                Z=[[0.0]],
                n_states=2,
            )
        with pytest.raises(StateError):
            MultiStateDataset(
                subject=[0],
                from_state=[0],  # states are 1-based
                to_state=[2],
                sojourn=[1.0],
                Z=[[0.0]],
                n_states=2,
            )

    def test_self_transition_rejected(self):
        with pytest.raises(StateError):
            MultiStateDataset(
                subject=[0],
                from_state=[1],
                to_state=[1],
                sojourn=[1.0],
                Z=[[0.0]],
                n_states=2,
            )

    def test_nonpositive_sojourn_rejected(self):
        with pytest.raises(ValueError):
            simple_dataset([0.0], [0.0])

    def test_nonfinite_beta_is_infeasible(self):
        data = simple_dataset([1.0, 2.0], np.zeros(2))
        assert markov_renewal_neg_partial_lik(np.array([np.nan]), data) == INFEASIBLE

    def test_wrong_beta_length(self):
        data = simple_dataset([1.0, 2.0], np.zeros(2))
        with pytest.raises(ValueError):
            markov_renewal_neg_partial_lik(np.zeros(3), data)

    def test_batch_matches_scalar(self):
        data = synth_two_state_dataset(20, 0.3, RngStream(5).child(0))
        objective = make_multistate_objective(data)
        B = RngStream(6).generator().normal(size=(7, 1))
        np.testing.assert_allclose(
            objective.evaluate_many(B), [objective(b) for b in B], rtol=1e-12
        )

    def test_synth_two_state_shapes(self):
        data = synth_two_state_dataset(30, 0.5, RngStream(1).child(0))
        assert data.n_records == 30
        assert data.n_states == 2
        assert set(np.unique(data.Z)) == {0.0, 1.0}
