"""Particle swarm optimization with the two-term stochastic attraction.

Velocities accumulate stochastic pulls toward the global and personal
bests with acceleration scale 2, so each stochastic factor has mean 1.
The textbook two-term recursion without damping is stochastically
unstable (particles oscillate at box scale forever and never refine), so
the previous velocity is carried with an inertia weight below one by
default; ``inertia=1.0`` recovers the undamped form exactly.  The default
0.4 sits inside the variance-stability region for acceleration 2 + 2.
A velocity clamp at the box width prevents numeric overflow only.

The same substream layout and determinism contract as the bat engine
apply: substream 0 initializes, substream ``(1, i)`` drives particle
``i`` with ``2 * dim`` uniforms per iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    Array,
    ObjectiveSpec,
    RngStream,
    RunResult,
    TraceRecorder,
    clamp_to_bounds,
    init_positions,
    strictly_better,
)

_INIT_SUBSTREAM = 0
_AGENT_SUBSTREAM = 1


@dataclass(frozen=True)
class PsoParams:
    n: int = 30
    accel: float = 2.0
    T: int = 100
    inertia: float = 0.4

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one particle")
        if self.accel <= 0.0:
            raise ValueError("acceleration scale must be positive")
        if self.T < 0:
            raise ValueError("iteration count cannot be negative")
        if not 0.0 <= self.inertia <= 1.0:
            raise ValueError("inertia weight must lie in [0, 1]")


@dataclass(frozen=True)
class ParticleState:
    """Read-only view of one particle."""

    x: Array
    v: Array
    personal_best_x: Array
    personal_best_f: float


@dataclass
class PsoSwarm:
    x: Array
    v: Array
    personal_best_x: Array
    personal_best_f: Array
    best_x: Array
    best_f: float
    iteration: int
    evals: int

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def particles(self) -> list[ParticleState]:
        return [
            ParticleState(
                self.x[i].copy(),
                self.v[i].copy(),
                self.personal_best_x[i].copy(),
                float(self.personal_best_f[i]),
            )
            for i in range(self.n)
        ]

    def copy(self) -> "PsoSwarm":
        return PsoSwarm(
            self.x.copy(),
            self.v.copy(),
            self.personal_best_x.copy(),
            self.personal_best_f.copy(),
            self.best_x.copy(),
            self.best_f,
            self.iteration,
            self.evals,
        )


def pso_velocity(
    x: Array, v: Array, global_best: Array, personal_best: Array, u1, u2,
    accel: float = 2.0, inertia: float = 1.0,
) -> Array:
    """Two-term velocity update with independent uniforms per term.

    ``inertia=1.0`` is the plain undamped recursion; values below one
    damp the carried velocity.
    """
    x = np.asarray(x, dtype=float)
    return (
        inertia * np.asarray(v, dtype=float)
        + accel * np.asarray(u1) * (np.asarray(global_best, dtype=float) - x)
        + accel * np.asarray(u2) * (np.asarray(personal_best, dtype=float) - x)
    )


def pso_init(objective: ObjectiveSpec, params: PsoParams, rng: RngStream) -> PsoSwarm:
    x = init_positions(objective.space, params.n, rng.child(_INIT_SUBSTREAM))
    values = objective.evaluate_many(x)
    best_i = int(np.argmin(values))
    return PsoSwarm(
        x=x,
        v=np.zeros_like(x),
        personal_best_x=x.copy(),
        personal_best_f=values.copy(),
        best_x=x[best_i].copy(),
        best_f=float(values[best_i]),
        iteration=0,
        evals=params.n,
    )


def _advance_swarm(
    swarm: PsoSwarm, params: PsoParams, objective: ObjectiveSpec, uniforms: Array
) -> None:
    """One synchronous iteration in place; ``uniforms`` is (n, 2, dim).

    Every particle is pulled toward the global best known *before* the
    iteration; personal and global bests refresh after all evaluations.
    """
    space = objective.space
    u1 = uniforms[:, 0, :]
    u2 = uniforms[:, 1, :]

    swarm.v = pso_velocity(
        swarm.x, swarm.v, swarm.best_x, swarm.personal_best_x, u1, u2,
        params.accel, params.inertia,
    )
    np.clip(swarm.v, -space.width, space.width, out=swarm.v)
    swarm.x = clamp_to_bounds(swarm.x + swarm.v, space)

    values = objective.evaluate_many(swarm.x)
    swarm.evals += swarm.n

    improved = values < swarm.personal_best_f
    swarm.personal_best_x[improved] = swarm.x[improved]
    swarm.personal_best_f[improved] = values[improved]

    top = int(np.argmin(values))
    if strictly_better(float(values[top]), swarm.best_f):
        swarm.best_f = float(values[top])
        swarm.best_x = swarm.x[top].copy()

    swarm.iteration += 1


def pso_step(
    swarm: PsoSwarm, params: PsoParams, objective: ObjectiveSpec, rng: RngStream
) -> PsoSwarm:
    """One iteration as a pure function of the swarm state."""
    dim = objective.space.dim
    offset = swarm.iteration * 2 * dim
    uniforms = np.stack(
        [
            rng.child(_AGENT_SUBSTREAM, i)
            .generator(advance_by=offset)
            .random(2 * dim)
            .reshape(2, dim)
            for i in range(swarm.n)
        ]
    )
    out = swarm.copy()
    _advance_swarm(out, params, objective, uniforms)
    return out


def pso_run(objective: ObjectiveSpec, params: PsoParams, seed: int) -> RunResult:
    """Run ``params.T`` iterations from a fresh population; seeded."""
    stream = RngStream(int(seed))
    swarm = pso_init(objective, params, stream)
    trace = TraceRecorder()
    trace.record(0, swarm.best_f)

    dim = objective.space.dim
    agents = [
        stream.child(_AGENT_SUBSTREAM, i).generator() for i in range(params.n)
    ]
    uniforms = np.empty((params.n, 2, dim))
    for _ in range(params.T):
        for i, gen in enumerate(agents):
            uniforms[i] = gen.random(2 * dim).reshape(2, dim)
        _advance_swarm(swarm, params, objective, uniforms)
        trace.record(swarm.iteration, swarm.best_f)

    return RunResult(
        best_x=swarm.best_x.copy(),
        best_f=swarm.best_f,
        trace=trace.freeze(),
        evals=swarm.evals,
        seed=int(seed),
    )
