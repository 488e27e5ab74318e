"""Velocity/position kernel for global-best PSO and its Vmax and linear-descent variants.

Random draws per iteration follow a fixed order: particle-major, then
dimension, with the personal-best factor drawn before the global-best factor.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import PsoParams, SwarmState, global_best_index
from .objectives import Objective


class SwarmDivergence(ArithmeticError):
    """A step produced non-finite positions or velocities; the swarm is left untouched."""

    def __init__(self, iteration: int):
        super().__init__(f"swarm state overflowed at iteration {iteration}")
        self.iteration = iteration


class VariantKind(str, enum.Enum):
    STANDARD = "standard"
    VMAX = "vmax"
    LINEAR_DESCENT = "linear_descent"


@dataclass(frozen=True)
class PsoVariant:
    kind: VariantKind = VariantKind.STANDARD
    vmax: float | None = None
    omega_start: float | None = None
    omega_end: float | None = None
    max_iterations: int | None = None
    asynchronous: bool = False

    def __post_init__(self):
        if self.kind is VariantKind.VMAX and not (self.vmax is not None and self.vmax > 0):
            raise ValueError("VMAX variant needs vmax > 0")
        if self.kind is VariantKind.LINEAR_DESCENT:
            if self.omega_start is None or self.omega_end is None or self.max_iterations is None:
                raise ValueError("LINEAR_DESCENT variant needs omega_start, omega_end and max_iterations")
            if self.omega_start < self.omega_end:
                raise ValueError("LINEAR_DESCENT needs omega_start >= omega_end")


STANDARD = PsoVariant()


def draw_factors(rng: np.random.Generator, shape) -> tuple[np.ndarray, np.ndarray]:
    """Uniform [0, 1) factors R1, R2 for every component of ``shape``."""
    r = rng.random(tuple(np.atleast_1d(shape)) + (2,))
    return r[..., 0], r[..., 1]


def velocity_update(position, velocity, personal_best, global_best, params: PsoParams, rng: np.random.Generator):
    """``w v + a1 R1 (p - x) + a2 R2 (g - x)`` with component-wise R1, R2.

    Works on one particle ``(N,)`` or a whole swarm ``(P, N)``.
    """
    position = np.asarray(position, dtype=float)
    r1, r2 = draw_factors(rng, position.shape)
    return (
        params.omega * np.asarray(velocity, dtype=float)
        + params.alpha1 * r1 * (np.asarray(personal_best, dtype=float) - position)
        + params.alpha2 * r2 * (np.asarray(global_best, dtype=float) - position)
    )


def position_update(position, velocity):
    return np.asarray(position, dtype=float) + np.asarray(velocity, dtype=float)


def clamp_velocity(v, vmax: float):
    if not vmax > 0:
        raise ValueError("vmax must be positive")
    return np.clip(np.asarray(v, dtype=float), -vmax, vmax)


def linear_descent_omega(iteration: int, max_iterations: int, omega_start: float, omega_end: float) -> float:
    return omega_start + (omega_end - omega_start) * iteration / max_iterations


def effective_params(swarm: SwarmState, variant: PsoVariant) -> PsoParams:
    if variant.kind is VariantKind.LINEAR_DESCENT:
        omega = linear_descent_omega(swarm.iteration, variant.max_iterations, variant.omega_start, variant.omega_end)
        return PsoParams(omega, swarm.params.alpha1, swarm.params.alpha2)
    return swarm.params


def pso_step(swarm: SwarmState, objective: Objective, variant: PsoVariant, rng: np.random.Generator) -> SwarmState:
    """Advance the swarm by one iteration and return the new state.

    Synchronous by default: every particle moves using the previous
    iteration's global best, then all bests are refreshed.  With
    ``variant.asynchronous`` the global best is refreshed after each particle.

    Raises:
        SwarmDivergence: if the update overflows; ``swarm`` is not modified.
    """
    params = effective_params(swarm, variant)
    if variant.asynchronous:
        return _async_step(swarm, objective, variant, params, rng)

    x = swarm.positions
    with np.errstate(over="ignore", invalid="ignore"):
        v = velocity_update(x, swarm.velocities, swarm.best_positions, swarm.global_best_position, params, rng)
        if variant.kind is VariantKind.VMAX:
            v = clamp_velocity(v, variant.vmax)
        x = position_update(x, v)
    if not (np.all(np.isfinite(v)) and np.all(np.isfinite(x))):
        raise SwarmDivergence(swarm.iteration + 1)

    fitness = objective.evaluate(x)
    improved = fitness < swarm.best_fitness
    best_positions = np.where(improved[:, None], x, swarm.best_positions)
    best_fitness = np.where(improved, fitness, swarm.best_fitness)

    g_pos, g_fit = swarm.global_best_position, swarm.global_best_fitness
    g = global_best_index(best_fitness)
    if best_fitness[g] < g_fit:
        g_pos, g_fit = best_positions[g].copy(), float(best_fitness[g])

    return SwarmState(x, v, best_positions, best_fitness, g_pos, g_fit, swarm.params, swarm.iteration + 1)


def _async_step(swarm, objective, variant, params, rng):
    new = swarm.copy()
    x, v = new.positions, new.velocities
    for i in range(new.size):
        with np.errstate(over="ignore", invalid="ignore"):
            vi = velocity_update(x[i], v[i], new.best_positions[i], new.global_best_position, params, rng)
            if variant.kind is VariantKind.VMAX:
                vi = clamp_velocity(vi, variant.vmax)
            xi = position_update(x[i], vi)
        if not (np.all(np.isfinite(vi)) and np.all(np.isfinite(xi))):
            raise SwarmDivergence(swarm.iteration + 1)
        v[i], x[i] = vi, xi
        f = objective.evaluate(xi)
        if f < new.best_fitness[i]:
            new.best_fitness[i] = f
            new.best_positions[i] = xi
            if f < new.global_best_fitness:
                new.global_best_fitness = float(f)
                new.global_best_position = xi.copy()
    new.iteration += 1
    return new
