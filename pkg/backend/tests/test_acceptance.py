"""End-to-end protocols: fitness array bookkeeping over long runs and the
published quality results at reduced scale."""
import pytest

from app.harness import load_problem, run_experiment, welch_t_test
from app.qap import QapProblem
from app.schemas import ExperimentSpec, StrategyConfig, StrategyKind, Termination
from app.search import LocalSearch, RandomStream, run_search
from app.tsp import TspProblem

from conftest import benchmark_file, make_qap, make_tsp


def _check_array_bookkeeping(problem, length: int, iterations: int, seed: int) -> None:
    search = LocalSearch(problem, StrategyConfig(kind=StrategyKind.DLAS, history_length=length), RandomStream(seed))
    array = search.strategy.array
    for _ in range(iterations):
        search.step()
        values = array.values
        assert array.max_value == max(values)
        assert 1 <= array.max_count <= values.count(array.max_value)


@pytest.mark.parametrize("length", [1, 2, 5, 50])
def test_dlas_array_max_stays_exact(length):
    _check_array_bookkeeping(TspProblem(make_tsp(20, seed=length)), length, 5000, seed=1)
    _check_array_bookkeeping(QapProblem(make_qap(12, seed=length)), length, 5000, seed=2)


@pytest.mark.slow
@pytest.mark.parametrize("length", [1, 2, 5, 50])
def test_dlas_array_max_stays_exact_long_run(length):
    _check_array_bookkeeping(TspProblem(make_tsp(20, seed=100 + length)), length, 100_000, seed=3)
    _check_array_bookkeeping(QapProblem(make_qap(12, seed=100 + length)), length, 100_000, seed=4)


@pytest.mark.slow
@pytest.mark.benchmark_data
def test_dlas_is_never_hc_like_at_ten_seconds():
    path = benchmark_file("pr1002.tsp")
    problem = load_problem(path)
    record = run_search(
        problem, StrategyConfig(kind=StrategyKind.DLAS, history_length=5), Termination(cutoff_seconds=10), rng_seed=1
    )
    assert record.hc_like_pct == 0.0


@pytest.mark.slow
@pytest.mark.benchmark_data
def test_lahc_behaves_like_hc_part_of_the_time():
    problem = load_problem(benchmark_file("u1817.tsp"))
    record = run_search(
        problem, StrategyConfig(kind=StrategyKind.LAHC, history_length=50000), Termination(cutoff_seconds=30),
        rng_seed=1,
    )
    assert record.hc_like_pct > 0


@pytest.mark.slow
@pytest.mark.benchmark_data
def test_dlas_beats_lahc_on_pr1002():
    dlas = StrategyConfig(kind=StrategyKind.DLAS, history_length=5)
    lahc = StrategyConfig(kind=StrategyKind.LAHC, history_length=50000)
    spec = ExperimentSpec(
        instance=benchmark_file("pr1002.tsp"), strategies=[dlas, lahc], runs_per_config=10, cutoff_seconds=30
    )
    result = run_experiment(spec, workers=4)
    dlas_row, lahc_row = result.aggregates
    assert dlas_row.mean_best_fitness < lahc_row.mean_best_fitness
    dlas_best = [r.best_fitness for r in result.records if r.label == dlas.label]
    lahc_best = [r.best_fitness for r in result.records if r.label == lahc.label]
    assert welch_t_test(dlas_best, lahc_best).significant


@pytest.mark.slow
@pytest.mark.benchmark_data
def test_dlas_reaches_the_lipa80b_optimum():
    spec = ExperimentSpec(
        instance=benchmark_file("lipa80b.dat"),
        strategies=[StrategyConfig(kind=StrategyKind.DLAS, history_length=10)],
        runs_per_config=10,
        cutoff_seconds=26,
    )
    result = run_experiment(spec, workers=4)
    assert result.spec.best_known == 7763962
    assert sum(record.deviation == 0 for record in result.records) >= 8
