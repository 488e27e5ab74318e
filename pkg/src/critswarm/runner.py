"""Drive a single seeded run of any algorithm and capture its trace."""
from __future__ import annotations

import logging
from dataclasses import asdict

import numpy as np

from .analysis import RunTrace, TraceRecorder
from .baselines import default_sampler, initial_search_state, powerlaw_search_step, uniform_search_step
from .core import Algorithm, RunConfig, initialize_swarm, make_rng
from .crips import metric_of, start_controller, crips_step, swarm_metric
from .pso import PsoVariant, SwarmDivergence, VariantKind, effective_params, pso_step

log = logging.getLogger(__name__)

NAN_PARAMS = (np.nan, np.nan, np.nan)


def config_snapshot(config: RunConfig) -> dict:
    d = asdict(config)
    d["algorithm"] = config.algorithm.value
    d["metric"] = config.metric.value
    d["shift"] = None if config.shift is None else [float(s) for s in config.shift]
    return d


def variant_for(config: RunConfig) -> PsoVariant:
    if config.algorithm is Algorithm.PSO_VMAX:
        return PsoVariant(VariantKind.VMAX, vmax=config.vmax, asynchronous=config.asynchronous)
    if config.algorithm is Algorithm.PSO_LD:
        return PsoVariant(
            VariantKind.LINEAR_DESCENT,
            omega_start=config.omega_start,
            omega_end=config.omega_end,
            max_iterations=config.max_iterations,
            asynchronous=config.asynchronous,
        )
    # plain PSO may still take an explicit cap
    if config.vmax is not None and config.algorithm is Algorithm.PSO:
        return PsoVariant(VariantKind.VMAX, vmax=config.vmax, asynchronous=config.asynchronous)
    return PsoVariant(asynchronous=config.asynchronous)


def run(config: RunConfig) -> RunTrace:
    """Execute ``config`` to completion, goal, or divergence."""
    objective = config.objective()
    rng = make_rng(config.seed)
    if config.algorithm in (Algorithm.RAND_UNIFORM, Algorithm.RAND_POWERLAW):
        return _run_search(config, objective, rng)
    return _run_swarm(config, objective, rng)


def _recorder(config, initial_best):
    return TraceRecorder(
        algorithm=config.algorithm.value,
        metric_kind=config.metric.value,
        seed=int(config.seed),
        initial_best_fitness=float(initial_best),
        max_iterations=int(config.max_iterations),
        config=config_snapshot(config),
    )


def _run_swarm(config, objective, rng) -> RunTrace:
    # each row carries the parameters in force after that iteration's update
    swarm = initialize_swarm(config, rng, objective)
    rec = _recorder(config, swarm.global_best_fitness)
    variant = variant_for(config)
    crips = config.algorithm is Algorithm.CRIPS
    if crips:
        controller = start_controller(
            swarm, config.metric, config.epsilon, config.resolved_sigma(objective), config.controller_sign
        )
    status = "completed"
    for _ in range(config.max_iterations):
        try:
            if crips:
                swarm, controller, metric = crips_step(swarm, objective, controller, config.metric, rng, variant)
                params = swarm.params.as_tuple()
            else:
                swarm = pso_step(swarm, objective, variant, rng)
                metric = swarm_metric(swarm, config.metric)
                params = effective_params(swarm, variant).as_tuple()
        except SwarmDivergence as exc:
            log.warning("%s seed %d diverged at iteration %d", config.algorithm.value, config.seed, exc.iteration)
            status = "diverged"
            break
        rec.record(swarm.iteration, swarm.global_best_fitness, metric, params)
        if swarm.global_best_fitness < config.goal_tolerance:
            status = "goal"
            break
    return rec.build(status)


def _run_search(config, objective, rng) -> RunTrace:
    state = initial_search_state(objective, config.particle_count, rng)
    rec = _recorder(config, state.global_best_fitness)
    sampler = None
    if config.algorithm is Algorithm.RAND_POWERLAW:
        sampler = default_sampler(objective, config.powerlaw_exponent, config.min_step, config.max_step)
    status = "completed"
    for _ in range(config.max_iterations):
        if sampler is None:
            state, _ = uniform_search_step(state, objective, rng)
        else:
            state, _ = powerlaw_search_step(state, sampler, objective, rng)
        metric = metric_of(state.positions, state.steps, config.metric)
        rec.record(state.iteration, state.global_best_fitness, metric, NAN_PARAMS)
        if state.global_best_fitness < config.goal_tolerance:
            status = "goal"
            break
    return rec.build(status)
