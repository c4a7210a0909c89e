from itertools import product

import numpy as np
import pytest
from pydantic import ValidationError

from app.exceptions import ConfigurationError
from app.schemas import StepCounting, StrategyConfig, StrategyKind, Termination
from app.search import (
    FitnessArray,
    LocalSearch,
    HillClimbing,
    LateAcceptance,
    RandomStream,
    StepCountingHillClimbing,
    TraceRecorder,
    derive_seed,
    dlas_accept,
    dlas_apply_replacement,
    dlas_replace_decision,
    hc_accept,
    hc_like_flag,
    lahc_accept,
    lahc_replace,
    run_search,
    schc_step,
)
from app.tsp import TspInstance, TspProblem

from conftest import make_tsp

DLAS5 = StrategyConfig(kind=StrategyKind.DLAS, history_length=5)


def _array(values, max_count=None):
    array = FitnessArray(len(values), values[0])
    array.values = list(values)
    array.max_value = max(values)
    array.max_count = values.count(array.max_value) if max_count is None else max_count
    return array


# =============================================================================
# ACCEPTANCE RULES
# =============================================================================

@pytest.mark.parametrize("candidate, current, expected", [(5, 7, True), (7, 7, True), (8, 7, False)])
def test_hc_accept(candidate, current, expected):
    assert hc_accept(candidate, current) is expected


@pytest.mark.parametrize("candidate, current, slot, expected", [
    (5, 7, 3, True),
    (9, 7, 10, True),
    (9, 7, 9, False),
])
def test_lahc_accept(candidate, current, slot, expected):
    assert lahc_accept(candidate, current, slot) is expected


@pytest.mark.parametrize("new_current, slot, expected", [(5, 8, 5), (8, 5, 5), (5, 5, 5)])
def test_lahc_replace_only_lowers_slots(new_current, slot, expected):
    array = _array([slot, 9])
    lahc_replace(array, 0, new_current)
    assert array.values[0] == expected


@pytest.mark.parametrize("candidate", range(95, 106))
def test_lahc_with_flat_history_at_the_best_is_hc(candidate):
    assert lahc_accept(candidate, 100, 100) is hc_accept(candidate, 100)


def test_lahc_with_flat_history_matches_hc_for_l_iterations():
    length, fitness = 7, 100
    lahc = LateAcceptance(StrategyConfig(kind=StrategyKind.LAHC, history_length=length))
    hc = HillClimbing(StrategyConfig(kind=StrategyKind.HC))
    lahc.start(fitness)
    hc.start(fitness)
    rng = np.random.default_rng(11)
    # No improving moves: every candidate is at least the current fitness.
    for k in range(3, 3 + length):
        candidate = fitness + int(rng.integers(0, 4))
        assert lahc.accept(candidate, fitness, k) is hc.accept(candidate, fitness, k)
        lahc.update(fitness, fitness, k)
        assert lahc.array.values == [fitness] * length
        assert lahc.is_hc_like(fitness)
    assert array.max_value == max(array.values)


@pytest.mark.parametrize("candidate, current, array_max, expected", [
    (7, 7, 5, True),
    (6, 4, 7, True),
    (7, 4, 7, False),
])
def test_dlas_accept(candidate, current, array_max, expected):
    assert dlas_accept(candidate, current, array_max) is expected


@pytest.mark.parametrize("new_current, previous, slot, expected", [
    (6, 5, 8, False),
    (9, 5, 7, True),
    (4, 4, 8, False),
    (3, 5, 4, True),
])
def test_dlas_replace_decision_examples(new_current, previous, slot, expected):
    assert dlas_replace_decision(new_current, previous, slot) is expected


def test_dlas_replacement_truth_table():
    # Every ordering of (F, F-, slot), ties included.
    for new_current, previous, slot in product(range(3), repeat=3):
        expected = new_current > slot or (new_current < slot and new_current < previous)
        assert dlas_replace_decision(new_current, previous, slot) is expected

        array = _array([slot, 2])
        written = dlas_apply_replacement(array, 0, new_current, previous)
        assert written is expected
        assert array.values[0] == (new_current if expected else slot)


def test_dlas_apply_replacement_decrements_count():
    array = _array([9, 9, 4])
    dlas_apply_replacement(array, 0, 5, 7)
    assert array.values == [5, 9, 4]
    assert (array.max_value, array.max_count) == (9, 1)


def test_dlas_apply_replacement_recomputes_when_count_hits_zero():
    array = _array([9, 4, 4])
    dlas_apply_replacement(array, 0, 5, 7)
    assert array.values == [5, 4, 4]
    assert (array.max_value, array.max_count) == (5, 1)


def test_dlas_apply_replacement_equal_slot_is_untouched():
    array = _array([4, 4, 4])
    assert not dlas_apply_replacement(array, 1, 4, 4)
    assert array.values == [4, 4, 4]
    assert (array.max_value, array.max_count) == (4, 3)


def test_dlas_raising_write_leaves_count_alone():
    array = _array([9, 4, 4])
    dlas_apply_replacement(array, 1, 9, 3)
    assert array.values == [9, 9, 4]
    # Undercounts, never overcounts.
    assert array.max_value == 9
    assert 1 <= array.max_count <= array.values.count(9)


def test_schc_step_bound():
    assert schc_step(9, 7, 10, counter_limit=4, iterations_done=1) == (True, 10)
    assert schc_step(9, 7, 9, counter_limit=4, iterations_done=1) == (False, 9)
    # Rejected move at a counter multiple: the bound takes the current fitness.
    assert schc_step(9, 6, 9, counter_limit=4, iterations_done=8) == (False, 6)


def test_schc_counting_improving_moves_only():
    strategy = StepCountingHillClimbing(
        StrategyConfig(kind=StrategyKind.SCHC, history_length=2, counting=StepCounting.IMP)
    )
    strategy.start(10)
    assert not strategy.accept(12, 10, 0)
    strategy.update(10, 10, 0)
    assert strategy.counter == 0
    assert strategy.accept(9, 10, 1)
    strategy.update(9, 10, 1)
    assert strategy.accept(8, 9, 2)
    strategy.update(8, 9, 2)
    assert strategy.bound == 8
    assert strategy.counter == 0


def test_schc_strategy_counting_every_step_follows_schc_step():
    limit = 3
    strategy = StepCountingHillClimbing(StrategyConfig(kind=StrategyKind.SCHC, history_length=limit))
    strategy.start(50)
    current, bound = 50, 50
    rng = np.random.default_rng(4)
    for k in range(40):
        candidate = current + int(rng.integers(-3, 5))
        expected, bound = schc_step(candidate, current, bound, limit, k + 1)
        assert strategy.accept(candidate, current, k) is expected
        if expected:
            current = candidate
        strategy.update(current, current, k)
        assert strategy.bound == bound


def test_schc_counting_accepted_moves_only():
    strategy = StepCountingHillClimbing(
        StrategyConfig(kind=StrategyKind.SCHC, history_length=2, counting=StepCounting.ACP)
    )
    strategy.start(10)
    strategy.accept(12, 10, 0)
    strategy.accept(10, 10, 1)
    assert strategy.counter == 1


@pytest.mark.parametrize("kind, threshold, best, expected", [
    (StrategyKind.LAHC, 5, 5, True),
    (StrategyKind.DLAS, 9, 5, False),
    (StrategyKind.HC, None, 5, True),
    (StrategyKind.SCHC, 7, 5, False),
])
def test_hc_like_flag(kind, threshold, best, expected):
    assert hc_like_flag(kind, threshold, best) is expected


# =============================================================================
# RANDOM STREAMS
# =============================================================================

def test_derive_seed_is_stable_and_distinct():
    assert derive_seed(42, 0) == derive_seed(42, 0)
    seeds = {derive_seed(42, run) for run in range(100)}
    assert len(seeds) == 100
    assert all(0 <= seed < 2**63 for seed in seeds)
    assert derive_seed(42, 0) != derive_seed(43, 0)


def test_pair_below_returns_distinct_indices():
    rng = RandomStream(7)
    for _ in range(2000):
        first, second = rng.pair_below(4)
        assert first != second
        assert 0 <= first < 4 and 0 <= second < 4


def test_random_stream_is_reproducible():
    a, b = RandomStream(99), RandomStream(99)
    assert [a.below(1000) for _ in range(50)] == [b.below(1000) for _ in range(50)]
    assert np.array_equal(a.permutation(30), b.permutation(30))


# =============================================================================
# SEARCH LOOP
# =============================================================================

def test_termination_needs_a_criterion():
    with pytest.raises(ValidationError):
        Termination()
    with pytest.raises(ValidationError):
        Termination(cutoff_seconds=0)
    with pytest.raises(ValidationError):
        Termination(iteration_budget=100, stall_fraction=0.1)


def test_zero_budget_returns_initial_solution(tsp20):
    record = run_search(tsp20, DLAS5, Termination(iteration_budget=0), rng_seed=5)
    initial = tsp20.full_fitness(tsp20.initial_solution(RandomStream(5)))
    assert record.iterations == 0
    assert record.best_fitness == initial
    assert record.hc_like_pct == 0.0
    assert record.last_best_iteration == 0


def test_too_small_problem_fails_before_the_loop():
    problem = TspProblem(TspInstance(name="tri", coordinates=[[0, 0], [3, 0], [0, 4]]))
    with pytest.raises(ConfigurationError):
        run_search(problem, DLAS5, Termination(iteration_budget=10), rng_seed=1)


def test_run_is_deterministic_under_an_iteration_budget():
    problem = TspProblem(make_tsp(6, seed=21))
    lahc = StrategyConfig(kind=StrategyKind.LAHC, history_length=1)
    termination = Termination(iteration_budget=100_000)
    first = run_search(problem, lahc, termination, rng_seed=123)
    second = run_search(problem, lahc, termination, rng_seed=123)
    assert first.best_fitness == second.best_fitness
    assert first.best_solution == second.best_solution
    assert first.accepted == second.accepted


@pytest.mark.parametrize("kind, length", [
    (StrategyKind.HC, 1),
    (StrategyKind.LAHC, 20),
    (StrategyKind.SCHC, 20),
    (StrategyKind.DLAS, 5),
])
@pytest.mark.parametrize("problem_fixture", ["tsp20", "qap12"])
def test_incremental_fitness_and_best_invariants(kind, length, problem_fixture, request):
    problem = request.getfixturevalue(problem_fixture)
    search = LocalSearch(problem, StrategyConfig(kind=kind, history_length=length), RandomStream(3))
    state = search.state
    previous_best = state.best_fitness
    for _ in range(3000):
        search.step()
        assert state.current_fitness == problem.full_fitness(state.current_solution)
        assert state.best_fitness <= state.current_fitness
        assert state.best_fitness <= previous_best
        previous_best = state.best_fitness
    assert problem.full_fitness(state.best_solution) == state.best_fitness


def test_dlas_never_behaves_like_hill_climbing(tsp20, qap12):
    for problem in (tsp20, qap12):
        for seed in range(3):
            record = run_search(problem, DLAS5, Termination(iteration_budget=20_000), rng_seed=seed)
            assert record.best_fitness < problem.full_fitness(problem.initial_solution(RandomStream(seed)))
            assert record.hc_like_pct == 0.0


def test_lahc_converges_to_hill_climbing_behaviour(tsp20):
    lahc = StrategyConfig(kind=StrategyKind.LAHC, history_length=5)
    record = run_search(tsp20, lahc, Termination(iteration_budget=20_000), rng_seed=1)
    assert 0 < record.hc_like_pct <= 100


def test_hill_climbing_is_always_hc_like(qap12):
    record = run_search(qap12, StrategyConfig(kind=StrategyKind.HC), Termination(iteration_budget=500), rng_seed=2)
    assert record.hc_like_pct == 100.0


def test_observer_sees_periodic_points_and_every_new_best(tsp20):
    recorder = TraceRecorder()
    record = run_search(
        tsp20, DLAS5, Termination(iteration_budget=10_000), rng_seed=4, observer=recorder, trace_period=1000
    )
    iterations = [point.iteration for point in recorder.points]
    assert iterations == sorted(set(iterations))
    assert all(k in iterations for k in range(0, 10_000, 1000))
    bests = [point.best for point in recorder.points]
    assert bests == sorted(bests, reverse=True)
    assert bests[-1] == record.best_fitness
    assert record.last_best_iteration in iterations


def test_trace_period_must_be_positive(tsp20):
    with pytest.raises(ConfigurationError):
        run_search(tsp20, DLAS5, Termination(iteration_budget=10), rng_seed=1, trace_period=0)


def test_cutoff_stops_the_run(qap12):
    record = run_search(qap12, DLAS5, Termination(cutoff_seconds=0.2), rng_seed=1)
    assert record.iterations > 0
    assert record.time_to_last_best <= record.elapsed_seconds
    assert record.elapsed_seconds < 2.0
