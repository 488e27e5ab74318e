"""Critical particle swarm optimisation with PSO and random-search baselines."""
from .core import Algorithm, ConfigError, Metric, PsoParams, RunConfig, SwarmState, initialize_swarm, make_rng
from .objectives import lookup_objective
from .runner import run

__all__ = [
    "Algorithm",
    "ConfigError",
    "Metric",
    "PsoParams",
    "RunConfig",
    "SwarmState",
    "initialize_swarm",
    "lookup_objective",
    "make_rng",
    "run",
]
