"""Shared infrastructure for the population-based optimizers.

Everything in this module is deliberately small and self-contained: a box
search space, a scalar objective wrapper, reproducible random substreams,
and the result record produced by every optimizer run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.random import PCG64, Generator, SeedSequence

Array = np.ndarray

#: Sentinel objective value for infeasible points (minimization convention).
INFEASIBLE = float("inf")


class DimensionMismatch(ValueError):
    """A vector does not match the search-space dimension."""


@dataclass(frozen=True)
class SearchSpace:
    """Axis-aligned box of admissible decision vectors.

    Parameters
    ----------
    lower, upper : array_like
        Componentwise bounds; ``lower[j] < upper[j]`` is required and both
        must be finite (uniform initialization samples the box directly).
    """

    lower: Array
    upper: Array

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.ndim != 1 or upper.ndim != 1 or lower.shape != upper.shape:
            raise ValueError("bounds must be 1-d arrays of equal length")
        if lower.size < 1:
            raise ValueError("search space needs at least one dimension")
        if not (np.isfinite(lower).all() and np.isfinite(upper).all()):
            raise ValueError("bounds must be finite")
        if not np.all(lower < upper):
            raise ValueError("every lower bound must be strictly below its upper bound")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def width(self) -> Array:
        return self.upper - self.lower

    @classmethod
    def box(cls, lower: float, upper: float, dim: int) -> "SearchSpace":
        """Symmetric helper: the same scalar bounds in every dimension."""
        return cls(np.full(dim, float(lower)), np.full(dim, float(upper)))

    def contains(self, x: Array, atol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(
            np.all(x >= self.lower - atol) and np.all(x <= self.upper + atol)
        )


def clamp_to_bounds(x: Array, space: SearchSpace) -> Array:
    """Project ``x`` componentwise onto the box.

    Out-of-bounds coordinates are clipped to the nearest bound; interior
    points pass through unchanged.  Also accepts a stack of row vectors.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != space.dim:
        raise DimensionMismatch(
            f"vector of length {x.shape[-1]} does not fit a {space.dim}-d space"
        )
    return np.clip(x, space.lower, space.upper)


@dataclass(frozen=True)
class ObjectiveSpec:
    """A pure scalar objective over a box search space.

    ``evaluate`` must be deterministic in its input and return a finite
    float or ``INFEASIBLE``.  ``batch`` optionally evaluates a stack of row
    vectors at once; the engines use it when present, so it must agree with
    ``evaluate`` row by row.  Only minimization is supported: wrap
    maximization problems by negating the objective.
    """

    space: SearchSpace
    evaluate: Callable[[Array], float]
    batch: Callable[[Array], Array] | None = None
    name: str = ""
    sense: str = "minimize"

    def __post_init__(self):
        if self.sense != "minimize":
            raise ValueError("only minimization is supported; negate to maximize")

    def __call__(self, x: Array) -> float:
        return float(self.evaluate(np.asarray(x, dtype=float)))

    def evaluate_many(self, points: Array) -> Array:
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != self.space.dim:
            raise DimensionMismatch("expected an (m, dim) stack of points")
        if points.shape[0] == 0:
            return np.empty(0)
        if self.batch is not None:
            out = np.asarray(self.batch(points), dtype=float)
        else:
            out = np.array([self.evaluate(p) for p in points], dtype=float)
        if out.shape != (points.shape[0],):
            raise ValueError("batch evaluator returned a wrong-shaped result")
        return out


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream keyed by ``(master_seed, stream key)``.

    Identical keys reproduce identical draw sequences; distinct keys give
    statistically independent streams (PCG64 seeded through a
    ``SeedSequence`` spawn key).  ``child`` derives substreams, e.g. one
    per agent, so concurrent evaluation cannot change results.
    """

    master_seed: int
    key: tuple[int, ...] = (0,)

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError("master_seed must fit in 64 unsigned bits")
        if any(k < 0 for k in self.key):
            raise ValueError("stream key components must be non-negative")

    @property
    def stream_id(self) -> int:
        return self.key[0]

    def child(self, *subkey: int) -> "RngStream":
        return RngStream(self.master_seed, self.key + tuple(int(k) for k in subkey))

    def generator(self, advance_by: int = 0) -> Generator:
        """Fresh generator for this stream, optionally fast-forwarded.

        ``advance_by`` counts *uniform doubles* already consumed; PCG64
        produces one double per state step, so advancing by that count
        reproduces the sequential stream position exactly.
        """
        bit_gen = PCG64(SeedSequence(self.master_seed, spawn_key=self.key))
        if advance_by:
            bit_gen.advance(int(advance_by))
        return Generator(bit_gen)


def derive_seed(master_seed: int, *key: int) -> int:
    """A fresh 64-bit seed deterministically derived from a master seed."""
    ss = SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def init_positions(space: SearchSpace, n: int, rng: RngStream | Generator) -> Array:
    """Uniform initial positions in the box, one row per agent."""
    if n < 1:
        raise ValueError("need at least one initial position")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    return gen.uniform(space.lower, space.upper, size=(int(n), space.dim))


@dataclass(frozen=True)
class RunResult:
    """Outcome of one seeded optimizer run.

    ``trace`` holds ``(iteration, best_f_so_far)`` pairs starting with the
    initial population at iteration 0; it is non-increasing and its last
    entry equals ``best_f``.
    """

    best_x: Array
    best_f: float
    trace: tuple[tuple[int, float], ...]
    evals: int
    seed: int

    def __post_init__(self):
        best_x = np.asarray(self.best_x, dtype=float)
        best_x.setflags(write=False)
        object.__setattr__(self, "best_x", best_x)
        object.__setattr__(self, "trace", tuple((int(t), float(v)) for t, v in self.trace))
        values = [v for _, v in self.trace]
        if values and any(b > a for a, b in zip(values, values[1:])):
            raise ValueError("best-value trace must be non-increasing")
        if values and values[-1] != self.best_f:
            raise ValueError("best_f must equal the final trace entry")


class TraceRecorder:
    """Accumulates the monotone best-so-far trace during a run."""

    def __init__(self):
        self._trace: list[tuple[int, float]] = []

    def record(self, iteration: int, best_f: float) -> None:
        if self._trace and best_f > self._trace[-1][1]:
            raise RuntimeError("internal error: best value increased")
        self._trace.append((iteration, float(best_f)))

    def freeze(self) -> tuple[tuple[int, float], ...]:
        return tuple(self._trace)


def strictly_better(candidate: float, incumbent: float) -> bool:
    """Strict-improvement comparator shared by all engines.

    Strictness matters: it makes accept/reject decisions invariant under
    multiplying the objective by a positive constant and keeps constant
    objectives fixed.
    """
    return candidate < incumbent
