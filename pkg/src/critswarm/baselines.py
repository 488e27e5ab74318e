"""Random-search baselines: uniform sampling and greedy power-law jumps.

Both spend one evaluation per particle slot per iteration, matching the
swarm algorithms' budget.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import global_best_index
from .objectives import Objective


@dataclass(frozen=True)
class PowerLawSampler:
    """Step lengths with density proportional to ``L**-exponent`` on [min_step, max_step]."""

    exponent: float = 2.0
    min_step: float = 1e-2
    max_step: float = 1.0

    def __post_init__(self):
        if not self.exponent > 1:
            raise ValueError("exponent must be > 1")
        if not 0 < self.min_step < self.max_step:
            raise ValueError("need 0 < min_step < max_step")

    def cdf(self, length):
        a1 = 1.0 - self.exponent
        lo, hi = self.min_step**a1, self.max_step**a1
        length = np.clip(np.asarray(length, dtype=float), self.min_step, self.max_step)
        return (length**a1 - lo) / (hi - lo)

    def inverse_cdf(self, u):
        a1 = 1.0 - self.exponent
        lo, hi = self.min_step**a1, self.max_step**a1
        out = (lo + np.asarray(u, dtype=float) * (hi - lo)) ** (1.0 / a1)
        return np.clip(out, self.min_step, self.max_step)


def default_sampler(objective: Objective, exponent: float = 2.0, min_step: float = 1e-2, max_step: float | None = None) -> PowerLawSampler:
    """Upper cutoff defaults to the region's diagonal so any point is reachable."""
    return PowerLawSampler(exponent, min_step, objective.diagonal if max_step is None else max_step)


def powerlaw_step_length(sampler: PowerLawSampler, rng: np.random.Generator, size=None):
    u = rng.random(size)
    out = sampler.inverse_cdf(u)
    return float(out) if size is None else out


def random_directions(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    """Isotropic unit vectors from normalised Gaussian draws."""
    d = rng.standard_normal((count, n))
    norms = np.linalg.norm(d, axis=1, keepdims=True)
    return d / np.where(norms > 0, norms, 1.0)


@dataclass
class SearchState:
    """Current slot positions, per-slot bests and the overall best.

    For uniform search the slots hold the latest samples; for power-law
    search the positions *are* the per-slot bests.
    """

    positions: np.ndarray
    steps: np.ndarray
    best_positions: np.ndarray
    best_fitness: np.ndarray
    global_best_position: np.ndarray
    global_best_fitness: float
    iteration: int = 0
    candidates: np.ndarray | None = None


def initial_search_state(objective: Objective, particles: int, rng: np.random.Generator) -> SearchState:
    low, high = objective.region_low, objective.region_high
    x = low + (high - low) * rng.random((particles, objective.dimension))
    f = objective.evaluate(x)
    g = global_best_index(f)
    return SearchState(x, np.zeros_like(x), x.copy(), f.copy(), x[g].copy(), float(f[g]))


def _refresh_global(state: SearchState, iteration: int) -> list[tuple[int, float]]:
    g = global_best_index(state.best_fitness)
    if state.best_fitness[g] < state.global_best_fitness:
        state.global_best_fitness = float(state.best_fitness[g])
        state.global_best_position = state.best_positions[g].copy()
        return [(iteration, state.global_best_fitness)]
    return []


def uniform_search_step(state: SearchState, objective: Objective, rng: np.random.Generator):
    """Sample one fresh uniform point per slot; returns (state, events)."""
    low, high = objective.region_low, objective.region_high
    x = low + (high - low) * rng.random(state.positions.shape)
    f = objective.evaluate(x)
    improved = f < state.best_fitness
    new = SearchState(
        positions=x,
        steps=x - state.positions,
        best_positions=np.where(improved[:, None], x, state.best_positions),
        best_fitness=np.where(improved, f, state.best_fitness),
        global_best_position=state.global_best_position,
        global_best_fitness=state.global_best_fitness,
        iteration=state.iteration + 1,
    )
    return new, _refresh_global(new, new.iteration)


def powerlaw_search_step(state: SearchState, sampler: PowerLawSampler, objective: Objective, rng: np.random.Generator):
    """Greedy jump from each slot's best by a power-law length in a random direction.

    Draw order: all step lengths, then all direction components.
    """
    count, n = state.best_positions.shape
    lengths = powerlaw_step_length(sampler, rng, count)
    steps = lengths[:, None] * random_directions(rng, count, n)
    candidates = state.best_positions + steps
    f = objective.evaluate(candidates)
    improved = f < state.best_fitness
    best_positions = np.where(improved[:, None], candidates, state.best_positions)
    new = SearchState(
        positions=best_positions,
        steps=np.where(improved[:, None], steps, 0.0),
        best_positions=best_positions,
        best_fitness=np.where(improved, f, state.best_fitness),
        global_best_position=state.global_best_position,
        global_best_fitness=state.global_best_fitness,
        iteration=state.iteration + 1,
        candidates=candidates,
    )
    return new, _refresh_global(new, new.iteration)
