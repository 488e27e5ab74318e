"""Shared domain types, the seeded random stream, and run configuration.

Swarm state is stored as dense ``(particles, dimension)`` arrays; the
per-particle :class:`ParticleState` view is materialised on demand.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .objectives import Objective


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


class Algorithm(str, enum.Enum):
    PSO = "pso"
    PSO_VMAX = "pso_vmax"
    PSO_LD = "pso_ld"
    CRIPS = "crips"
    RAND_UNIFORM = "rand_uniform"
    RAND_POWERLAW = "rand_powerlaw"


class Metric(str, enum.Enum):
    VELOCITY_NORM = "velocity_norm"
    CENTROID_DISTANCE = "centroid_distance"
    INTERPARTICLE_DISTANCE = "interparticle_distance"


def make_rng(seed: int) -> np.random.Generator:
    """One PCG64 stream per run; the seed is reduced to 64 bits."""
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


def uniform_vector(rng: np.random.Generator, n: int, low: float, high: float) -> np.ndarray:
    if not low < high:
        raise ValueError(f"uniform_vector needs low < high, got [{low}, {high})")
    x = low + (high - low) * rng.random(n)
    # rounding can land exactly on high when the span is huge
    return np.minimum(x, np.nextafter(high, low))


@dataclass(frozen=True)
class PsoParams:
    omega: float
    alpha1: float
    alpha2: float

    def shifted(self, delta: float) -> "PsoParams":
        return PsoParams(self.omega + delta, self.alpha1 + delta, self.alpha2 + delta)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.omega, self.alpha1, self.alpha2)


# initial values used by the critical swarm and the fixed-parameter PSO
DEFAULT_PARAMS = PsoParams(0.815, 1.0, 1.0)
# linear-descent comparison: omega 0.7 -> 0.4 with alpha1 = alpha2 = 2
LD_PARAMS = PsoParams(0.7, 2.0, 2.0)
LD_OMEGA_END = 0.4
DEFAULT_VMAX = 50.0
DEFAULT_EPSILON = 0.15


@dataclass(frozen=True)
class ParticleState:
    position: np.ndarray
    velocity: np.ndarray
    personal_best_position: np.ndarray
    personal_best_fitness: float


@dataclass
class SwarmState:
    positions: np.ndarray
    velocities: np.ndarray
    best_positions: np.ndarray
    best_fitness: np.ndarray
    global_best_position: np.ndarray
    global_best_fitness: float
    params: PsoParams
    iteration: int = 0

    @property
    def size(self) -> int:
        return self.positions.shape[0]

    @property
    def dimension(self) -> int:
        return self.positions.shape[1]

    @property
    def particles(self) -> list[ParticleState]:
        return [
            ParticleState(
                self.positions[i].copy(),
                self.velocities[i].copy(),
                self.best_positions[i].copy(),
                float(self.best_fitness[i]),
            )
            for i in range(self.size)
        ]

    def copy(self) -> "SwarmState":
        return replace(
            self,
            positions=self.positions.copy(),
            velocities=self.velocities.copy(),
            best_positions=self.best_positions.copy(),
            best_fitness=self.best_fitness.copy(),
            global_best_position=self.global_best_position.copy(),
        )


def global_best_index(best_fitness: np.ndarray) -> int:
    # np.argmin returns the first occurrence, so the lowest index wins ties
    return int(np.argmin(best_fitness))


@dataclass
class RunConfig:
    """Everything needed to replay one run bit-for-bit."""

    algorithm: Algorithm = Algorithm.CRIPS
    dimension: int = 20
    particle_count: int = 25
    max_iterations: int = 10_000
    seed: int = 0
    objective_name: str = "schwefel"
    initial_params: PsoParams | None = None
    epsilon: float = DEFAULT_EPSILON
    metric: Metric = Metric.VELOCITY_NORM
    sigma: float | None = None
    vmax: float | None = None
    omega_start: float | None = None
    omega_end: float | None = None
    goal_tolerance: float = 1e-3
    # extensions beyond the core fields, all with documented defaults
    shift: tuple[float, ...] | None = None
    penalty: float | None = None
    velocity_init_fraction: float = 0.1
    controller_sign: str = "stabilizing"
    asynchronous: bool = False
    powerlaw_exponent: float = 2.0
    min_step: float = 1e-2
    max_step: float | None = None

    def __post_init__(self) -> None:
        self.algorithm = _coerce_enum(Algorithm, self.algorithm, "algorithm")
        self.metric = _coerce_enum(Metric, self.metric, "metric")
        if self.initial_params is None:
            self.initial_params = LD_PARAMS if self.algorithm is Algorithm.PSO_LD else DEFAULT_PARAMS
        if self.algorithm is Algorithm.PSO_LD:
            if self.omega_start is None:
                self.omega_start = LD_PARAMS.omega
            if self.omega_end is None:
                self.omega_end = LD_OMEGA_END
        if self.algorithm is Algorithm.PSO_VMAX and self.vmax is None:
            self.vmax = DEFAULT_VMAX
        self.validate()

    def validate(self) -> None:
        for name in ("dimension", "particle_count", "max_iterations"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be a positive integer")
        if self.algorithm is Algorithm.CRIPS and not 0.0 < self.epsilon < 1.0:
            raise ConfigError(f"epsilon must lie in (0, 1) for crips, got {self.epsilon}")
        if self.sigma is not None and not self.sigma > 0:
            raise ConfigError(f"sigma must be > 0, got {self.sigma}")
        if self.vmax is not None and not self.vmax > 0:
            raise ConfigError(f"vmax must be > 0, got {self.vmax}")
        if self.algorithm is Algorithm.PSO_LD and self.omega_start < self.omega_end:
            raise ConfigError("omega_start must be >= omega_end for pso_ld")
        if self.controller_sign not in ("stabilizing", "verbatim"):
            raise ConfigError(f"controller_sign must be 'stabilizing' or 'verbatim', got {self.controller_sign!r}")
        if self.velocity_init_fraction < 0:
            raise ConfigError("velocity_init_fraction must be >= 0")
        if not np.all(np.isfinite(self.initial_params.as_tuple())):
            raise ConfigError("initial parameters must be finite")
        if self.algorithm is Algorithm.RAND_POWERLAW:
            if not self.powerlaw_exponent > 1:
                raise ConfigError("powerlaw_exponent must be > 1")
            if not self.min_step > 0:
                raise ConfigError("min_step must be > 0")
            if self.max_step is not None and not self.max_step > self.min_step:
                raise ConfigError("max_step must exceed min_step")

    def objective(self) -> "Objective":
        from .objectives import lookup_objective

        return lookup_objective(self.objective_name, self.dimension, shift=self.shift, penalty=self.penalty)

    def resolved_sigma(self, objective: "Objective") -> float:
        """Default sigma is a fifth of the region width in one dimension."""
        return self.sigma if self.sigma is not None else objective.max_width / 5.0


def _coerce_enum(kind, value, name):
    if isinstance(value, kind):
        return value
    try:
        return kind(str(value).strip().lower())
    except ValueError:
        choices = ", ".join(m.value for m in kind)
        raise ConfigError(f"{name}: unknown value {value!r} (choose from {choices})") from None


def initialize_swarm(config: RunConfig, rng: np.random.Generator, objective: "Objective | None" = None) -> SwarmState:
    """Uniform positions in the region of interest, small uniform velocities.

    Draw order: all positions (particle-major), then all velocities.
    """
    if objective is None:
        objective = config.objective()
    p, n = config.particle_count, config.dimension
    low, high = objective.region_low, objective.region_high
    positions = low + (high - low) * rng.random((p, n))
    vrange = config.velocity_init_fraction * (high - low)
    velocities = -vrange + 2.0 * vrange * rng.random((p, n))
    fitness = objective.evaluate(positions)
    g = global_best_index(fitness)
    return SwarmState(
        positions=positions,
        velocities=velocities,
        best_positions=positions.copy(),
        best_fitness=fitness.copy(),
        global_best_position=positions[g].copy(),
        global_best_fitness=float(fitness[g]),
        params=config.initial_params,
        iteration=0,
    )
