"""Swarm diversity metrics and the critical-swarm parameter controller."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.distance import pdist

from .core import Metric, PsoParams, SwarmState
from .objectives import Objective
from .pso import STANDARD, pso_step

# Sign applied to the parameter increment.  "verbatim" uses the update as
# written, theta <- theta - eps * tanh(-dS / 2 sigma), which grows the
# parameters while the swarm expands.  "stabilizing" reverses it so that an
# expanding swarm is damped and a collapsing one is excited.
CONTROLLER_SIGNS = {"verbatim": 1.0, "stabilizing": -1.0}


def metric_of(positions: np.ndarray, velocities: np.ndarray | None, metric: Metric) -> float:
    positions = np.asarray(positions, dtype=float)
    if positions.ndim != 2 or positions.shape[0] == 0:
        raise ValueError("swarm metric needs at least one particle")
    metric = Metric(metric)
    # an exploding swarm may overflow here; the next step reports the divergence
    with np.errstate(over="ignore", invalid="ignore"):
        return _metric(positions, velocities, metric)


def _metric(positions, velocities, metric):
    if metric is Metric.VELOCITY_NORM:
        if velocities is None:
            raise ValueError("velocity norm needs velocities")
        return float(np.mean(np.linalg.norm(velocities, axis=1)))
    if metric is Metric.CENTROID_DISTANCE:
        return float(np.mean(np.linalg.norm(positions - positions.mean(axis=0), axis=1)))
    if positions.shape[0] < 2:
        return 0.0
    return float(np.mean(pdist(positions)))


def swarm_metric(swarm: SwarmState, metric: Metric) -> float:
    """Mean velocity norm, mean distance to the centroid, or mean pairwise distance."""
    return metric_of(swarm.positions, swarm.velocities, metric)


def metric_delta(current: float, previous: float) -> float:
    return current - previous


def squash(delta_s: float, sigma: float) -> float:
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return math.tanh(-delta_s / (2.0 * sigma))


def update_params(params: PsoParams, delta_s: float, epsilon: float, sigma: float, sign: float = 1.0) -> PsoParams:
    """Shift omega, alpha1 and alpha2 by the same amount ``-sign * eps * squash``."""
    return params.shifted(-sign * epsilon * squash(delta_s, sigma))


@dataclass(frozen=True)
class ControllerState:
    epsilon: float
    sigma: float
    previous_metric: float
    sign: float = CONTROLLER_SIGNS["stabilizing"]

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")


def start_controller(swarm: SwarmState, metric: Metric, epsilon: float, sigma: float, sign: str | float = "stabilizing") -> ControllerState:
    """Seed the controller with the metric of the swarm before its first move."""
    if isinstance(sign, str):
        sign = CONTROLLER_SIGNS[sign]
    return ControllerState(epsilon, sigma, swarm_metric(swarm, metric), float(sign))


def crips_step(
    swarm: SwarmState,
    objective: Objective,
    controller: ControllerState,
    metric: Metric,
    rng: np.random.Generator,
    variant=STANDARD,
) -> tuple[SwarmState, ControllerState, float]:
    """Move the swarm, then feed the metric change back into the parameters.

    Returns the new swarm, the new controller and the metric value measured
    after the move.
    """
    moved = pso_step(swarm, objective, variant, rng)
    current = swarm_metric(moved, metric)
    delta = metric_delta(current, controller.previous_metric)
    moved.params = update_params(moved.params, delta, controller.epsilon, controller.sigma, controller.sign)
    return moved, replace(controller, previous_metric=current), current
