import numpy as np
import pytest

from batopt import (
    BatParams,
    HsParams,
    PsoParams,
    RngStream,
    SearchSpace,
    available_optimizers,
    bat_run,
    get_optimizer,
    hs_init,
    hs_run,
    hs_step,
    pso_init,
    pso_run,
    pso_step,
    register_optimizer,
    run_optimizer,
)
from batopt.harmony import _improvise
from batopt.pso import pso_velocity
from batopt.registry import _REGISTRY


class TestPsoVelocity:
    def test_fixed_point(self):
        x = np.array([1.5, -2.0])
        v = pso_velocity(x, np.zeros(2), x, x, 0.3, 0.8)
        np.testing.assert_array_equal(v, np.zeros(2))

    def test_forced_draws_arithmetic(self):
        # u1 = u2 = 0.5 turns both stochastic factors into exactly 1.
        v = pso_velocity(
            np.array([1.0]), np.array([0.0]), np.array([0.0]), np.array([0.0]), 0.5, 0.5
        )
        np.testing.assert_array_equal(v, [-2.0])
        x_new = np.array([1.0]) + v
        np.testing.assert_array_equal(x_new, [-1.0])


class TestPsoRun:
    def test_sphere_convergence_with_defaults(self, sphere5):
        result = pso_run(sphere5, PsoParams(n=30, T=2000), seed=0)
        assert result.best_f < 1e-6

    def test_undamped_form_explores_without_refining(self, sphere5):
        # With inertia 1 the velocity recursion is the plain undamped
        # two-term update: it keeps oscillating at box scale, so it makes
        # solid progress but no fine convergence.
        result = pso_run(sphere5, PsoParams(n=30, T=2000, inertia=1.0), seed=0)
        assert result.best_f < 20.0
        assert result.best_f > 1e-4
        assert result.best_f < result.trace[0][1] / 5.0

    def test_trace_monotone_and_personal_bests(self, sphere2):
        params = PsoParams(n=12, T=40)
        stream = RngStream(4)
        swarm = pso_init(sphere2, params, stream)
        prev_pbest = swarm.personal_best_f.copy()
        prev_best = swarm.best_f
        for _ in range(params.T):
            swarm = pso_step(swarm, params, sphere2, stream)
            assert np.all(swarm.personal_best_f <= prev_pbest + 1e-15)
            assert swarm.best_f <= prev_best + 1e-15
            assert np.all(np.abs(swarm.v) <= sphere2.space.width + 1e-12)
            assert sphere2.space.contains(swarm.x)
            prev_pbest = swarm.personal_best_f.copy()
            prev_best = swarm.best_f

    def test_step_matches_run(self, sphere2):
        params = PsoParams(n=8, T=5)
        stream = RngStream(5)
        swarm = pso_init(sphere2, params, stream)
        for _ in range(params.T):
            swarm = pso_step(swarm, params, sphere2, stream)
        run = pso_run(sphere2, params, 5)
        np.testing.assert_array_equal(swarm.best_x, run.best_x)
        assert swarm.best_f == run.best_f

    def test_determinism(self, sphere5):
        a = pso_run(sphere5, PsoParams(n=10, T=30), seed=77)
        b = pso_run(sphere5, PsoParams(n=10, T=30), seed=77)
        assert a.trace == b.trace
        np.testing.assert_array_equal(a.best_x, b.best_x)

    def test_evals_accounting(self, sphere2):
        result = pso_run(sphere2, PsoParams(n=9, T=11), seed=0)
        assert result.evals == 9 * 12  # init + one full swarm per iteration

    def test_params_validation(self):
        with pytest.raises(ValueError):
            PsoParams(n=0)
        with pytest.raises(ValueError):
            PsoParams(accel=0.0)
        with pytest.raises(ValueError):
            PsoParams(inertia=1.5)


class TestHarmonySearch:
    def test_memory_only_copying_admits_no_new_values(self, sphere2):
        # With the accepting rate at its ceiling and no pitch adjustment,
        # every candidate coordinate is a verbatim memory copy.  In one
        # dimension the candidate always equals an existing member, so the
        # memory can only accumulate duplicates of values it already held:
        # no new value ever enters and the best value cannot change.
        space = SearchSpace.box(-3, 3, 1)
        obj = type(sphere2)(
            space=space, evaluate=lambda x: float(x[0] ** 2)
        )
        params = HsParams(
            memory_size=6, r_accept=1 - 1e-12, r_pa=1e-12, b_p=1.0, T=40
        )
        stream = RngStream(13)
        memory = hs_init(obj, params, stream)
        initial_values = set(memory.values.tolist())
        initial_best = memory.best_f
        for _ in range(params.T):
            memory = hs_step(memory, params, obj, stream)
        assert set(memory.values.tolist()) <= initial_values
        assert memory.best_f == initial_best

    def test_tiny_bandwidth_pitch_is_noop(self):
        # A pitch bandwidth below one ulp cannot change any coordinate,
        # so every candidate coordinate is an exact memory value.
        space = SearchSpace.box(-3, 3, 2)
        params = HsParams(
            memory_size=4, r_accept=1 - 1e-12, r_pa=0.999, b_p=1e-300, T=1
        )
        memory_x = np.array([[1.0, -2.0], [0.5, 0.25], [-1.5, 2.0], [3.0, -3.0]])

        class Mem:
            x = memory_x
            size = 4

        draws = RngStream(3).generator().random((5, 2))
        candidate = _improvise(Mem, params, space, draws)
        assert all(candidate[j] in memory_x[:, j] for j in range(2))

    def test_sphere_refinement(self, sphere2):
        result = hs_run(sphere2, HsParams(memory_size=20, T=5000), seed=0)
        assert result.best_f < 1e-4

    def test_worst_value_non_increasing(self, sphere2):
        params = HsParams(memory_size=10, T=60)
        stream = RngStream(21)
        memory = hs_init(sphere2, params, stream)
        prev_worst = memory.worst_f
        for _ in range(params.T):
            memory = hs_step(memory, params, sphere2, stream)
            assert memory.worst_f <= prev_worst + 1e-15
            assert np.all(np.diff(memory.values) >= 0)  # stays sorted
            prev_worst = memory.worst_f

    def test_step_matches_run(self, sphere2):
        params = HsParams(memory_size=6, T=9)
        stream = RngStream(11)
        memory = hs_init(sphere2, params, stream)
        for _ in range(params.T):
            memory = hs_step(memory, params, sphere2, stream)
        run = hs_run(sphere2, params, 11)
        np.testing.assert_array_equal(memory.best_x, run.best_x)
        assert memory.best_f == run.best_f

    def test_determinism(self, sphere2):
        a = hs_run(sphere2, HsParams(memory_size=8, T=100), seed=31)
        b = hs_run(sphere2, HsParams(memory_size=8, T=100), seed=31)
        assert a.trace == b.trace

    def test_probability_identities(self):
        params = HsParams(r_accept=0.9, r_pa=0.3)
        assert params.p_random == pytest.approx(0.1)
        assert params.p_pitch == pytest.approx(0.27)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(memory_size=0),
            dict(r_accept=0.0),
            dict(r_accept=1.0),
            dict(r_pa=0.0),
            dict(r_pa=1.0),
            dict(b_p=0.0),
        ],
    )
    def test_params_validation(self, kwargs):
        with pytest.raises(ValueError):
            HsParams(**kwargs)


class TestRegistry:
    def test_builtins_present(self):
        assert {"bat", "pso", "hs"} <= set(available_optimizers())

    def test_registered_bat_matches_direct_run(self, sphere2):
        direct = bat_run(sphere2, BatParams(n=15, T=20), seed=42)
        via_registry = run_optimizer("bat", sphere2, 42, iterations=20, swarm=15)
        assert direct.best_f == via_registry.best_f
        np.testing.assert_array_equal(direct.best_x, via_registry.best_x)
        assert direct.trace == via_registry.trace

    def test_duplicate_name_rejected(self):
        with pytest.raises(ValueError):
            register_optimizer("bat", lambda *a, **k: None)

    def test_unknown_name(self):
        with pytest.raises(KeyError, match="unknown optimizer"):
            get_optimizer("simulated-annealing")

    def test_custom_registration_and_overwrite(self, sphere2):
        def fake_runner(objective, seed, *, iterations=None, swarm=None, **params):
            return bat_run(objective, BatParams(n=3, T=1), seed)

        register_optimizer("fake-for-test", fake_runner)
        try:
            out = run_optimizer("fake-for-test", sphere2, 1)
            assert out.evals == 3 * 2 or out.evals >= 3
            register_optimizer("fake-for-test", fake_runner, overwrite=True)
        finally:
            _REGISTRY.pop("fake-for-test", None)
