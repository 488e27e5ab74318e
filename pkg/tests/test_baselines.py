import numpy as np
import pytest
from hypothesis import given, strategies as st

from critswarm.baselines import (
    PowerLawSampler,
    SearchState,
    default_sampler,
    initial_search_state,
    powerlaw_search_step,
    powerlaw_step_length,
    uniform_search_step,
)
from critswarm.core import make_rng
from critswarm.objectives import lookup_objective


def truncated_powerlaw_cdf(x, a, lo, hi):
    # closed form integral of L**-a on [lo, x], normalised on [lo, hi]
    return (lo ** (1 - a) - x ** (1 - a)) / (lo ** (1 - a) - hi ** (1 - a))


@pytest.fixture
def schwefel3():
    return lookup_objective("schwefel", 3)


def test_uniform_samples_stay_in_region(schwefel3):
    rng = make_rng(0)
    state = initial_search_state(schwefel3, 10, rng)
    for _ in range(50):
        state, _ = uniform_search_step(state, schwefel3, rng)
        assert np.all(schwefel3.contains(state.positions))


def test_uniform_best_is_min_of_all_evaluations(schwefel3):
    rng = make_rng(1)
    state = initial_search_state(schwefel3, 7, rng)
    seen = list(schwefel3.evaluate(state.positions))
    for _ in range(40):
        state, _ = uniform_search_step(state, schwefel3, rng)
        seen.extend(schwefel3.evaluate(state.positions))
        assert state.global_best_fitness == min(seen)


def test_uniform_reproducible(schwefel3):
    def go():
        rng = make_rng(5)
        s = initial_search_state(schwefel3, 4, rng)
        out = []
        for _ in range(20):
            s, _ = uniform_search_step(s, schwefel3, rng)
            out.append(s.positions.copy())
        return np.array(out)

    assert np.array_equal(go(), go())


def test_uniform_events_are_strict_improvements(schwefel3):
    rng = make_rng(2)
    state = initial_search_state(schwefel3, 5, rng)
    prev = state.global_best_fitness
    for _ in range(100):
        state, events = uniform_search_step(state, schwefel3, rng)
        if events:
            assert events == [(state.iteration, state.global_best_fitness)]
            assert state.global_best_fitness < prev
        else:
            assert state.global_best_fitness == prev
        prev = state.global_best_fitness


@given(st.floats(1.01, 6.0), st.floats(1e-3, 1.0), st.floats(2.0, 1e4), st.integers(0, 2**32))
def test_step_length_within_bounds(a, lo, ratio, seed):
    s = PowerLawSampler(a, lo, lo * ratio)
    out = powerlaw_step_length(s, make_rng(seed), 200)
    assert np.all((out >= s.min_step) & (out <= s.max_step))


def test_step_length_matches_closed_form_cdf():
    s = PowerLawSampler(2.0, 1e-2, np.sqrt(20) * 1000)
    draws = np.sort(powerlaw_step_length(s, make_rng(2024), 100_000))
    n = len(draws)
    theo = truncated_powerlaw_cdf(draws, 2.0, s.min_step, s.max_step)
    ks = max(np.max(np.arange(1, n + 1) / n - theo), np.max(theo - np.arange(n) / n))
    assert ks < 0.02


def test_steep_exponent_concentrates_near_min():
    s = PowerLawSampler(5.0, 1.0, 1000.0)
    # closed-form median: lo * 2**(1/(a-1)) for hi >> lo
    analytic = (1.0 ** -4 - 0.5 * (1.0 ** -4 - 1000.0 ** -4)) ** (-1 / 4)
    assert analytic < 2.0
    draws = powerlaw_step_length(s, make_rng(3), 20_000)
    assert np.median(draws) < 2.0
    assert np.median(draws) == pytest.approx(analytic, rel=0.02)


def test_single_draw_returns_float():
    assert isinstance(powerlaw_step_length(PowerLawSampler(), make_rng(0)), float)


@pytest.mark.parametrize("kwargs", [dict(exponent=1.0), dict(min_step=0.0), dict(min_step=2.0, max_step=1.0)])
def test_sampler_validation(kwargs):
    with pytest.raises(ValueError):
        PowerLawSampler(**kwargs)


def test_default_sampler_reaches_everything():
    obj = lookup_objective("schwefel", 20)
    s = default_sampler(obj)
    assert s.max_step == pytest.approx(np.sqrt(20) * 1000)
    assert s.max_step >= obj.diagonal
    assert s.min_step == 1e-2 and s.exponent == 2.0


def _state(x, obj):
    f = obj.evaluate(x)
    g = int(np.argmin(f))
    return SearchState(x.copy(), np.zeros_like(x), x.copy(), f.copy(), x[g].copy(), float(f[g]))


def test_worse_candidate_is_rejected():
    obj = lookup_objective("schwefel", 2)
    x = np.array([obj.known_optimum_position])
    state = _state(x, obj)
    new, events = powerlaw_search_step(state, PowerLawSampler(2.0, 1.0, 10.0), obj, make_rng(0))
    assert np.array_equal(new.best_positions, x)
    assert events == []


def test_better_candidate_is_accepted():
    obj = lookup_objective("schwefel", 2)
    # from outside the region every in-region candidate is an improvement
    x = np.array([[510.0, 0.0]])
    state = _state(x, obj)
    rng = make_rng(1)
    for _ in range(200):
        state, events = powerlaw_search_step(state, PowerLawSampler(2.0, 10.0, 50.0), obj, rng)
        if events:
            break
    assert events and state.global_best_fitness < 1000.0
    assert np.array_equal(state.global_best_position, state.best_positions[0])


def test_displacement_norm_equals_length():
    obj = lookup_objective("schwefel", 5)
    rng = make_rng(7)
    state = initial_search_state(obj, 8, rng)
    sampler = PowerLawSampler(2.0, 0.5, 100.0)
    replay = make_rng(7)
    initial_search_state(obj, 8, replay)
    lengths = powerlaw_step_length(sampler, replay, 8)
    new, _ = powerlaw_search_step(state, sampler, obj, rng)
    disp = np.linalg.norm(new.candidates - state.best_positions, axis=1)
    assert np.allclose(disp, lengths, rtol=1e-12)


@given(st.integers(0, 10_000))
def test_powerlaw_bests_monotone(seed):
    obj = lookup_objective("schwefel", 4)
    rng = make_rng(seed)
    state = initial_search_state(obj, 5, rng)
    sampler = default_sampler(obj)
    for _ in range(30):
        new, _ = powerlaw_search_step(state, sampler, obj, rng)
        assert np.all(new.best_fitness <= state.best_fitness)
        assert new.global_best_fitness <= state.global_best_fitness
        state = new
