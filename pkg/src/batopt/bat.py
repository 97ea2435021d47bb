"""The basic bat algorithm.

Echolocation-inspired swarm search: each agent carries a position,
velocity, frequency, loudness ``A`` and pulse-emission rate ``r``.  Agents
fly every iteration; a candidate (a local perturbation of the incumbent
best when the emission gate fires, otherwise the flown position) is
evaluated only while the loudness gate is open, and is accepted when it
strictly improves the agent's own incumbent value.  Acceptance decays the
loudness geometrically and raises the emission rate toward its ceiling,
shifting the swarm from exploration to exploitation.  The global best is
kept elitistically across every evaluation.

Randomness layout (all PCG64 substreams of the run seed): substream 0
initializes positions and frequencies; substream ``(1, i)`` drives agent
``i``, consuming a fixed number of uniforms per iteration so draws are
pre-assigned and results are independent of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    Array,
    ObjectiveSpec,
    RngStream,
    RunResult,
    SearchSpace,
    TraceRecorder,
    clamp_to_bounds,
    init_positions,
    strictly_better,
)

_INIT_SUBSTREAM = 0
_AGENT_SUBSTREAM = 1


@dataclass(frozen=True)
class BatParams:
    """Tuning constants of the bat algorithm.

    Defaults follow the tuned setting for 100-agent swarms: initial
    loudness and emission ceiling 0.9, loudness decay 0.95, emission
    growth 0.9, frequencies uniform on [0, 5].
    """

    n: int = 100
    f_min: float = 0.0
    f_max: float = 5.0
    alpha: float = 0.95
    gamma: float = 0.9
    A0: float = 0.9
    r0: float = 0.9
    T: int = 100
    #: Draw an independent perturbation per coordinate in the local search.
    #: Disable to perturb all coordinates by one shared scalar, which
    #: restricts the search to a diagonal line and converges far worse on
    #: anything above one dimension.
    per_coord_eps: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one bat")
        if not self.f_min < self.f_max:
            raise ValueError("f_min must be below f_max")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie strictly inside (0, 1)")
        if self.gamma <= 0.0:
            raise ValueError("gamma must be positive")
        if self.A0 <= 0.0:
            raise ValueError("initial loudness must be positive")
        if not 0.0 < self.r0 <= 1.0:
            raise ValueError("emission ceiling r0 must lie in (0, 1]")
        if self.T < 0:
            raise ValueError("iteration count cannot be negative")

    @classmethod
    def small(cls, **overrides) -> "BatParams":
        """Compact preset (20 agents, 2000 iterations) for smooth fits."""
        defaults = dict(n=20, T=2000)
        defaults.update(overrides)
        return cls(**defaults)

    def draws_per_iteration(self, dim: int) -> int:
        return 3 + (dim if self.per_coord_eps else 1)


@dataclass(frozen=True)
class BatState:
    """Read-only view of one agent (used for inspection and tests)."""

    x: Array
    v: Array
    f: float
    A: float
    r: float
    value: float
    accepts: int


@dataclass
class BatSwarm:
    """Full swarm state between iterations (arrays, one row per agent)."""

    x: Array
    v: Array
    f: Array
    A: Array
    r: Array
    value: Array
    accepts: Array
    best_x: Array
    best_f: float
    iteration: int
    evals: int

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def bats(self) -> list[BatState]:
        return [
            BatState(
                self.x[i].copy(),
                self.v[i].copy(),
                float(self.f[i]),
                float(self.A[i]),
                float(self.r[i]),
                float(self.value[i]),
                int(self.accepts[i]),
            )
            for i in range(self.n)
        ]

    def copy(self) -> "BatSwarm":
        return BatSwarm(
            self.x.copy(),
            self.v.copy(),
            self.f.copy(),
            self.A.copy(),
            self.r.copy(),
            self.value.copy(),
            self.accepts.copy(),
            self.best_x.copy(),
            self.best_f,
            self.iteration,
            self.evals,
        )


def update_loudness(A_prev: float, alpha: float) -> float:
    """Geometric loudness decay applied on each accepted solution."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly inside (0, 1)")
    if np.any(np.asarray(A_prev) <= 0.0):
        raise ValueError("loudness must be positive")
    return alpha * A_prev


def update_emission_rate(r0: float, gamma: float, t) -> float:
    """Emission rate after ``t`` acceptances: ``r0 * (1 - exp(-gamma t))``.

    Monotone increasing in ``t`` with limit ``r0``; zero at ``t = 0``.
    """
    if not 0.0 < r0 <= 1.0:
        raise ValueError("emission ceiling r0 must lie in (0, 1]")
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    return r0 * -np.expm1(-gamma * np.asarray(t, dtype=float))


def draw_frequency(f_min: float, f_max: float, beta) -> float:
    """Map a uniform variate ``beta`` in [0, 1] onto [f_min, f_max]."""
    beta = np.asarray(beta, dtype=float)
    if np.any(beta < 0.0) or np.any(beta > 1.0):
        raise ValueError("beta must lie in [0, 1]")
    return f_min + (f_max - f_min) * beta


def update_velocity_position(
    x: Array, v: Array, best_x: Array, f, space: SearchSpace
) -> tuple[Array, Array]:
    """One flight step: ``v += (x - best) * f``; position moves and clamps.

    Note the sign: positive frequency pushes *away* from the best, so the
    flight explores; convergence is driven by the local search and
    acceptance loop, not by the flight itself.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    best_x = np.asarray(best_x, dtype=float)
    if x.shape != v.shape or x.shape[-1] != best_x.shape[-1]:
        raise ValueError("position, velocity and best vectors must agree in length")
    f = np.asarray(f, dtype=float)
    if f.ndim and f.shape[0] == x.shape[0] and x.ndim > 1:
        f = f[:, None]
    v_new = v + (x - best_x) * f
    x_new = clamp_to_bounds(x + v_new, space)
    return v_new, x_new


def local_search_step(
    best_x: Array, mean_loudness: float, eps, space: SearchSpace
) -> Array:
    """Perturb the incumbent best by ``eps * mean_loudness``, then clamp.

    ``eps`` is a scalar in [-1, 1] applied to every coordinate, or an
    array of per-coordinate perturbations when configured.
    """
    if mean_loudness < 0.0:
        raise ValueError("mean loudness cannot be negative")
    eps = np.asarray(eps, dtype=float)
    if np.any(eps < -1.0) or np.any(eps > 1.0):
        raise ValueError("eps must lie in [-1, 1]")
    return clamp_to_bounds(np.asarray(best_x, dtype=float) + eps * mean_loudness, space)


def bat_init(objective: ObjectiveSpec, params: BatParams, rng: RngStream) -> BatSwarm:
    """Evaluate a uniform initial population and assemble the swarm."""
    space = objective.space
    gen = rng.child(_INIT_SUBSTREAM).generator()
    x = init_positions(space, params.n, gen)
    f0 = gen.uniform(params.f_min, params.f_max, size=params.n)
    values = objective.evaluate_many(x)
    best_i = int(np.argmin(values))
    return BatSwarm(
        x=x,
        v=np.zeros_like(x),
        f=f0,
        A=np.full(params.n, params.A0),
        r=np.zeros(params.n),
        value=values,
        accepts=np.zeros(params.n, dtype=np.int64),
        best_x=x[best_i].copy(),
        best_f=float(values[best_i]),
        iteration=0,
        evals=params.n,
    )


def _advance_swarm(
    swarm: BatSwarm, params: BatParams, objective: ObjectiveSpec, uniforms: Array
) -> None:
    """One synchronous iteration, in place.

    ``uniforms`` holds each agent's pre-assigned draws for this iteration:
    columns are (frequency beta, emission gate, loudness gate, eps...).
    Every agent sees the best point and mean loudness from the start of
    the iteration, so the candidate evaluations are order-independent;
    the swarm best refreshes once at the end.
    """
    space = objective.space
    beta = uniforms[:, 0]
    gate_emit = uniforms[:, 1]
    gate_loud = uniforms[:, 2]
    eps = 2.0 * uniforms[:, 3:] - 1.0

    best_x = swarm.best_x
    mean_loudness = float(swarm.A.mean())

    swarm.f = draw_frequency(params.f_min, params.f_max, beta)
    swarm.v, flown = update_velocity_position(
        swarm.x, swarm.v, best_x, swarm.f, space
    )
    swarm.x = flown

    candidates = flown.copy()
    local = gate_emit > swarm.r
    if np.any(local):
        candidates[local] = local_search_step(best_x, mean_loudness, eps[local], space)

    evaluate = gate_loud < swarm.A
    idx = np.flatnonzero(evaluate)
    if idx.size:
        cand_values = objective.evaluate_many(candidates[idx])
        swarm.evals += idx.size

        accepted = cand_values < swarm.value[idx]
        acc = idx[accepted]

        # The bat already sits on an evaluated flown candidate, so its
        # current objective value is known regardless of acceptance; keep
        # it honest.  Without this refresh the incumbent values go stale
        # at their last accepted level, acceptance dries up, and the
        # loudness (hence the local-search radius) stops shrinking.
        flown_eval = ~local[idx]
        swarm.value[idx[flown_eval]] = cand_values[flown_eval]

        if acc.size:
            swarm.x[acc] = candidates[acc]
            swarm.value[acc] = cand_values[accepted]
            swarm.A[acc] = update_loudness(swarm.A[acc], params.alpha)
            swarm.accepts[acc] += 1
            swarm.r[acc] = update_emission_rate(
                params.r0, params.gamma, swarm.accepts[acc]
            )

        top = int(np.argmin(cand_values))
        if strictly_better(float(cand_values[top]), swarm.best_f):
            swarm.best_f = float(cand_values[top])
            swarm.best_x = candidates[idx[top]].copy()

    swarm.iteration += 1


def bat_step(
    swarm: BatSwarm, params: BatParams, objective: ObjectiveSpec, rng: RngStream
) -> BatSwarm:
    """One iteration as a pure function of the swarm state.

    Reconstructs each agent's draws for ``swarm.iteration`` by fast-
    forwarding its substream, so stepping manually from any snapshot
    reproduces exactly what :func:`bat_run` computes internally.
    """
    k = params.draws_per_iteration(objective.space.dim)
    offset = swarm.iteration * k
    uniforms = np.stack(
        [
            rng.child(_AGENT_SUBSTREAM, i).generator(advance_by=offset).random(k)
            for i in range(swarm.n)
        ]
    )
    out = swarm.copy()
    _advance_swarm(out, params, objective, uniforms)
    return out


def bat_run(objective: ObjectiveSpec, params: BatParams, seed: int) -> RunResult:
    """Run ``params.T`` iterations from a fresh population; seeded."""
    stream = RngStream(int(seed))
    swarm = bat_init(objective, params, stream)
    trace = TraceRecorder()
    trace.record(0, swarm.best_f)

    k = params.draws_per_iteration(objective.space.dim)
    agents = [
        stream.child(_AGENT_SUBSTREAM, i).generator() for i in range(params.n)
    ]
    uniforms = np.empty((params.n, k))
    for _ in range(params.T):
        for i, gen in enumerate(agents):
            uniforms[i] = gen.random(k)
        _advance_swarm(swarm, params, objective, uniforms)
        trace.record(swarm.iteration, swarm.best_f)

    return RunResult(
        best_x=swarm.best_x.copy(),
        best_f=swarm.best_f,
        trace=trace.freeze(),
        evals=swarm.evals,
        seed=int(seed),
    )
