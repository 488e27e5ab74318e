"""Benchmark objectives with a constant penalty outside the region of interest.

Every ``evaluate`` accepts a single point of shape ``(N,)`` or a batch of
shape ``(..., N)`` and returns a float or an array of matching leading shape.
A point is outside the region if any component is.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import ConfigError

SCHWEFEL_CONSTANT = 418.9829
SCHWEFEL_OPTIMUM = 420.9687
SCHWEFEL_BOUND = 500.0
SCHWEFEL_PENALTY_PER_DIM = 500.0

GRIEWANK_BOUND = 600.0
GRIEWANK_PENALTY_PER_DIM = 700.0
DEFAULT_GRIEWANK_SHIFT = 60.0


def _inside(x: np.ndarray, low, high) -> np.ndarray:
    return np.all((x >= low) & (x <= high), axis=-1)


def _as_result(values: np.ndarray, x: np.ndarray):
    return float(values) if x.ndim == 1 else values


def schwefel(x, penalty: float | None = None):
    """Schwefel's function on [-500, 500]^N, ``500 N`` everywhere else."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    if penalty is None:
        penalty = SCHWEFEL_PENALTY_PER_DIM * n
    value = SCHWEFEL_CONSTANT * n - np.sum(x * np.sin(np.sqrt(np.abs(x))), axis=-1)
    value = np.where(_inside(x, -SCHWEFEL_BOUND, SCHWEFEL_BOUND), value, penalty)
    return _as_result(value, x)


def _griewank_raw(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    scale = np.sqrt(np.arange(1, n + 1, dtype=float))
    return 1.0 + np.sum(x * x, axis=-1) / 4000.0 - np.prod(np.cos(x / scale), axis=-1)


def griewank(x, penalty: float | None = None):
    """Standard Griewank on [-600, 600]^N with a constant penalty outside."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    if penalty is None:
        penalty = GRIEWANK_PENALTY_PER_DIM * n
    value = np.where(_inside(x, -GRIEWANK_BOUND, GRIEWANK_BOUND), _griewank_raw(x), penalty)
    return _as_result(value, x)


def shifted_griewank(x, shift, penalty: float | None = None):
    """``griewank(x - shift)``; the region of interest moves with the shift."""
    x = np.asarray(x, dtype=float)
    shift = np.asarray(shift, dtype=float)
    if shift.shape[-1] != x.shape[-1]:
        raise ValueError(f"shift has length {shift.shape[-1]}, point has length {x.shape[-1]}")
    return griewank(x - shift, penalty=penalty)


@dataclass(frozen=True)
class Objective:
    name: str
    dimension: int
    region_low: np.ndarray
    region_high: np.ndarray
    evaluate: Callable
    known_optimum_position: np.ndarray | None = None
    known_optimum_value: float | None = None
    penalty: float | None = None

    @property
    def width(self) -> np.ndarray:
        return self.region_high - self.region_low

    @property
    def max_width(self) -> float:
        """Largest extent of the region along any one axis."""
        return float(np.max(self.width))

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(self.width))

    def contains(self, x) -> np.ndarray:
        return _inside(np.asarray(x, dtype=float), self.region_low, self.region_high)


def _schwefel_objective(n, shift, penalty):
    penalty = SCHWEFEL_PENALTY_PER_DIM * n if penalty is None else penalty
    return Objective(
        name="schwefel",
        dimension=n,
        region_low=np.full(n, -SCHWEFEL_BOUND),
        region_high=np.full(n, SCHWEFEL_BOUND),
        evaluate=lambda x: schwefel(x, penalty),
        known_optimum_position=np.full(n, SCHWEFEL_OPTIMUM),
        known_optimum_value=0.0,
        penalty=penalty,
    )


def _griewank_objective(n, shift, penalty):
    penalty = GRIEWANK_PENALTY_PER_DIM * n if penalty is None else penalty
    return Objective(
        name="griewank",
        dimension=n,
        region_low=np.full(n, -GRIEWANK_BOUND),
        region_high=np.full(n, GRIEWANK_BOUND),
        evaluate=lambda x: griewank(x, penalty),
        known_optimum_position=np.zeros(n),
        known_optimum_value=0.0,
        penalty=penalty,
    )


def _shifted_griewank_objective(n, shift, penalty):
    penalty = GRIEWANK_PENALTY_PER_DIM * n if penalty is None else penalty
    if shift is None:
        shift = np.full(n, DEFAULT_GRIEWANK_SHIFT)
    else:
        shift = np.asarray(shift, dtype=float)
        if shift.size == 1:
            shift = np.full(n, float(shift.reshape(-1)[0]))
        if shift.shape != (n,):
            raise ConfigError(f"shift: expected {n} components, got {shift.size}")
    shift = shift.copy()
    return Objective(
        name="shifted_griewank",
        dimension=n,
        region_low=shift - GRIEWANK_BOUND,
        region_high=shift + GRIEWANK_BOUND,
        evaluate=lambda x: shifted_griewank(x, shift, penalty),
        known_optimum_position=shift,
        known_optimum_value=0.0,
        penalty=penalty,
    )


REGISTRY = {
    "schwefel": _schwefel_objective,
    "griewank": _griewank_objective,
    "shifted_griewank": _shifted_griewank_objective,
}


def lookup_objective(name: str, dimension: int, *, shift=None, penalty: float | None = None) -> Objective:
    """Build a registered objective for ``dimension`` variables.

    Raises:
        ConfigError: if ``name`` is not registered or ``dimension`` < 1.
    """
    key = str(name).strip().lower()
    if key not in REGISTRY:
        raise ConfigError(f"unknown objective {name!r} (choose from {', '.join(sorted(REGISTRY))})")
    if int(dimension) < 1:
        raise ConfigError("dimension must be a positive integer")
    return REGISTRY[key](int(dimension), shift, penalty)
