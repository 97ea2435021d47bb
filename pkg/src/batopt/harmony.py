"""Harmony search over a box, one improvisation per step.

Each candidate coordinate is drawn fresh from the bounds with probability
``1 - r_accept``, otherwise copied from a random memory member and then
pitch-adjusted by ``b_p * rand`` (rand uniform on (-1, 1)) with
probability ``r_pa``.  The candidate replaces the worst memory member
when strictly better, so the memory's worst value never increases.

The improviser draws from a single substream with a fixed number of
uniforms per step (5 per coordinate), which keeps stepping resumable and
seed-deterministic like the other engines.
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
)

_INIT_SUBSTREAM = 0
_IMPROVISE_SUBSTREAM = 1


@dataclass(frozen=True)
class HsParams:
    memory_size: int = 30
    r_accept: float = 0.9
    r_pa: float = 0.3
    b_p: float = 0.1
    T: int = 1000

    def __post_init__(self):
        if self.memory_size < 1:
            raise ValueError("memory must hold at least one solution")
        if not 0.0 < self.r_accept < 1.0:
            raise ValueError("memory accepting rate must lie strictly in (0, 1)")
        if not 0.0 < self.r_pa < 1.0:
            raise ValueError("pitch adjusting rate must lie strictly in (0, 1)")
        if self.b_p <= 0.0:
            raise ValueError("pitch bandwidth must be positive")
        if self.T < 0:
            raise ValueError("step count cannot be negative")

    @property
    def p_random(self) -> float:
        return 1.0 - self.r_accept

    @property
    def p_pitch(self) -> float:
        return self.r_accept * self.r_pa


@dataclass
class HsMemory:
    """Harmony memory, kept sorted by objective value (best first)."""

    x: Array
    values: Array
    steps: int
    evals: int

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def best_x(self) -> Array:
        return self.x[0]

    @property
    def best_f(self) -> float:
        return float(self.values[0])

    @property
    def worst_f(self) -> float:
        return float(self.values[-1])

    def copy(self) -> "HsMemory":
        return HsMemory(self.x.copy(), self.values.copy(), self.steps, self.evals)


def hs_init(objective: ObjectiveSpec, params: HsParams, rng: RngStream) -> HsMemory:
    x = init_positions(objective.space, params.memory_size, rng.child(_INIT_SUBSTREAM))
    values = objective.evaluate_many(x)
    order = np.argsort(values, kind="stable")
    return HsMemory(
        x=x[order], values=values[order], steps=0, evals=params.memory_size
    )


def _improvise(memory: HsMemory, params: HsParams, space, draws: Array) -> Array:
    """Build one candidate from a (5, dim) block of uniforms."""
    gate, value, member, pitch_gate, pitch = draws
    lo, hi = space.lower, space.upper

    idx = np.minimum((member * memory.size).astype(np.intp), memory.size - 1)
    candidate = memory.x[idx, np.arange(space.dim)].copy()
    adjust = pitch_gate < params.r_pa
    candidate[adjust] += params.b_p * (2.0 * pitch[adjust] - 1.0)

    from_bounds = gate < params.p_random
    candidate[from_bounds] = lo[from_bounds] + value[from_bounds] * (
        hi[from_bounds] - lo[from_bounds]
    )
    return clamp_to_bounds(candidate, space)


def _advance_memory(
    memory: HsMemory, params: HsParams, objective: ObjectiveSpec, draws: Array
) -> None:
    candidate = _improvise(memory, params, objective.space, draws)
    value = objective(candidate)
    memory.evals += 1
    if value < memory.worst_f:
        # Insert in sorted position, dropping the worst member.
        at = int(np.searchsorted(memory.values, value, side="right"))
        memory.x[at + 1 :] = memory.x[at:-1].copy()
        memory.values[at + 1 :] = memory.values[at:-1].copy()
        memory.x[at] = candidate
        memory.values[at] = value
    memory.steps += 1


def hs_step(
    memory: HsMemory, params: HsParams, objective: ObjectiveSpec, rng: RngStream
) -> HsMemory:
    """One improvisation as a pure function of the memory state."""
    dim = objective.space.dim
    offset = memory.steps * 5 * dim
    draws = (
        rng.child(_IMPROVISE_SUBSTREAM)
        .generator(advance_by=offset)
        .random(5 * dim)
        .reshape(5, dim)
    )
    out = memory.copy()
    _advance_memory(out, params, objective, draws)
    return out


def hs_run(objective: ObjectiveSpec, params: HsParams, seed: int) -> RunResult:
    """Run ``params.T`` improvisations from a fresh memory; seeded."""
    stream = RngStream(int(seed))
    memory = hs_init(objective, params, stream)
    trace = TraceRecorder()
    trace.record(0, memory.best_f)

    dim = objective.space.dim
    gen = stream.child(_IMPROVISE_SUBSTREAM).generator()
    for _ in range(params.T):
        _advance_memory(memory, params, objective, gen.random(5 * dim).reshape(5, dim))
        trace.record(memory.steps, memory.best_f)

    return RunResult(
        best_x=memory.best_x.copy(),
        best_f=memory.best_f,
        trace=trace.freeze(),
        evals=memory.evals,
        seed=int(seed),
    )
