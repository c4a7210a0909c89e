"""Iterated local search with HC, LAHC, SCHC and DLAS acceptance.

The loop is written once, against the ``Problem`` interface; the strategies
only decide acceptance and how their memory (fitness array or bound) evolves.
All fitness values are Python ints, so equality tests are exact.

``Problem`` is the public extension point of the library: a new problem type
only needs the six methods below, and its ``move_delta`` must agree exactly with
``full_fitness`` (``full_fitness(after) == full_fitness(before) + delta``).
"""
from __future__ import annotations

import logging
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, ClassVar, Generic, Optional, TypeVar

import numpy as np

from .exceptions import ConfigurationError
from .schemas import (
    RunRecord,
    StepCounting,
    StrategyConfig,
    StrategyKind,
    Termination,
    TracePoint,
)

logger = logging.getLogger(__name__)

Fitness = int

DEFAULT_TRACE_PERIOD = 1000

# Seeds are kept to 63 bits so they fit a signed BIGINT column and JSON readers.
_SEED_MASK = (1 << 63) - 1

SolutionT = TypeVar("SolutionT")
MoveT = TypeVar("MoveT")


# =============================================================================
# RANDOM STREAMS
# =============================================================================

def derive_seed(base_seed: int, run_index: int) -> int:
    """Seed of run ``run_index`` in a batch started from ``base_seed``.

    Mixes both numbers through numpy's SeedSequence, which is stable across
    platforms and numpy versions.
    """
    sequence = np.random.SeedSequence([base_seed, run_index])
    return int(sequence.generate_state(1, dtype=np.uint64)[0]) & _SEED_MASK


class RandomStream:
    """PCG64 generator with buffered integer draws for the search loop."""

    def __init__(self, seed: int, buffer_size: int = 4096):
        self.seed = seed
        self.generator = np.random.Generator(np.random.PCG64(seed))
        self._buffer_size = buffer_size
        self._bound = 0
        self._buffer: list[int] = []
        self._position = 0

    def below(self, bound: int) -> int:
        """A uniform integer in ``[0, bound)``."""
        if bound != self._bound or self._position >= len(self._buffer):
            self._buffer = self.generator.integers(0, bound, size=self._buffer_size).tolist()
            self._bound = bound
            self._position = 0
        value = self._buffer[self._position]
        self._position += 1
        return value

    def pair_below(self, bound: int) -> tuple[int, int]:
        """Two distinct uniform integers in ``[0, bound)``, redrawing the second on a tie."""
        first = self.below(bound)
        second = self.below(bound)
        while second == first:
            second = self.below(bound)
        return first, second

    def permutation(self, n: int) -> np.ndarray:
        return self.generator.permutation(n).astype(np.int64)


# =============================================================================
# PROBLEM INTERFACE
# =============================================================================

class Problem(ABC, Generic[SolutionT, MoveT]):
    """What the search loop needs from a problem backend."""

    # Smallest instance the move operator can work on.
    min_size: ClassVar[int] = 2

    @property
    @abstractmethod
    def name(self) -> str: ...

    @property
    @abstractmethod
    def size(self) -> int: ...

    @abstractmethod
    def initial_solution(self, rng: RandomStream) -> SolutionT: ...

    @abstractmethod
    def full_fitness(self, solution: SolutionT) -> Fitness: ...

    @abstractmethod
    def propose_move(self, solution: SolutionT, rng: RandomStream) -> MoveT: ...

    @abstractmethod
    def move_delta(self, solution: SolutionT, move: MoveT) -> Fitness: ...

    @abstractmethod
    def apply_move(self, solution: SolutionT, move: MoveT) -> None: ...

    def copy_solution(self, solution: SolutionT) -> SolutionT:
        return solution.copy()  # type: ignore[attr-defined]

    def check_size(self) -> None:
        if self.size < self.min_size:
            raise ConfigurationError(
                f"{self.name}: {type(self).__name__} needs at least {self.min_size} "
                f"elements for its move operator, got {self.size}"
            )


# =============================================================================
# FITNESS ARRAY
# =============================================================================

class FitnessArray:
    """Circular array of past fitness values with a lazily maintained maximum.

    ``max_count`` may undercount the occurrences of ``max_value`` (writes that
    raise a slot to the maximum are not counted) but never overcounts, so the
    full scan triggered when it reaches zero keeps ``max_value`` exact.
    """

    __slots__ = ("values", "max_value", "max_count")

    def __init__(self, length: int, initial: Fitness):
        if length < 1:
            raise ConfigurationError(f"fitness array length must be >= 1, got {length}")
        self.values = [initial] * length
        self.max_value = initial
        self.max_count = length

    def __len__(self) -> int:
        return len(self.values)

    def recompute(self) -> None:
        self.max_value = max(self.values)
        self.max_count = self.values.count(self.max_value)
        logger.debug("fitness array max recomputed: %d (x%d)", self.max_value, self.max_count)


# =============================================================================
# ACCEPTANCE AND REPLACEMENT RULES
# =============================================================================

def hc_accept(candidate: Fitness, current: Fitness) -> bool:
    return candidate <= current


def lahc_accept(candidate: Fitness, current: Fitness, slot: Fitness) -> bool:
    return candidate <= current or candidate < slot


def lahc_replace(array: FitnessArray, index: int, new_current: Fitness) -> bool:
    """Lower ``array[index]`` to ``new_current`` if that is strictly smaller.

    LAHC slots only ever decrease, so the max count stays exact here.
    """
    values = array.values
    slot = values[index]
    if new_current >= slot:
        return False
    if slot == array.max_value:
        array.max_count -= 1
    values[index] = new_current
    if array.max_count == 0:
        array.recompute()
    return True


def dlas_accept(candidate: Fitness, current: Fitness, array_max: Fitness) -> bool:
    return candidate == current or candidate < array_max


def dlas_replace_decision(new_current: Fitness, previous: Fitness, slot: Fitness) -> bool:
    return new_current > slot or (new_current < slot and new_current < previous)


def dlas_apply_replacement(array: FitnessArray, index: int, new_current: Fitness, previous: Fitness) -> bool:
    """DLAS replacement of slot ``index``; returns whether the slot was written."""
    values = array.values
    slot = values[index]
    if new_current > slot:
        # The max count is deliberately left alone on this branch.
        values[index] = new_current
        return True
    if new_current < slot and new_current < previous:
        if slot == array.max_value:
            array.max_count -= 1
        values[index] = new_current
        if array.max_count == 0:
            array.recompute()
        return True
    return False


def schc_accept(candidate: Fitness, current: Fitness, bound: Fitness) -> bool:
    return candidate <= current or candidate < bound


def schc_step(
    candidate: Fitness,
    current: Fitness,
    bound: Fitness,
    counter_limit: int,
    iterations_done: int,
) -> tuple[bool, Fitness]:
    """One counted SCHC iteration.

    ``iterations_done`` includes the iteration being decided (k + 1 for
    iteration k when every step counts). The bound takes the post-acceptance
    fitness whenever that count is a multiple of ``counter_limit``.
    """
    accepted = schc_accept(candidate, current, bound)
    if iterations_done % counter_limit == 0:
        bound = candidate if accepted else current
    return accepted, bound


def hc_like_flag(kind: StrategyKind, threshold: Optional[Fitness], best_fitness: Fitness) -> bool:
    """True when no move worse than the best so far can be accepted."""
    if kind is StrategyKind.HC:
        return True
    return threshold == best_fitness


# =============================================================================
# STRATEGIES
# =============================================================================

class AcceptanceStrategy(ABC):
    kind: ClassVar[StrategyKind]

    def __init__(self, config: StrategyConfig):
        self.config = config

    def start(self, fitness: Fitness) -> None:
        pass

    @abstractmethod
    def accept(self, candidate: Fitness, current: Fitness, iteration: int) -> bool: ...

    def update(self, current: Fitness, previous: Fitness, iteration: int) -> None:
        pass

    @property
    def threshold(self) -> Optional[Fitness]:
        """Largest fitness a worsening move may stay below; None for HC."""
        return None

    def is_hc_like(self, best_fitness: Fitness) -> bool:
        return hc_like_flag(self.kind, self.threshold, best_fitness)


class HillClimbing(AcceptanceStrategy):
    kind = StrategyKind.HC

    def accept(self, candidate: Fitness, current: Fitness, iteration: int) -> bool:
        return hc_accept(candidate, current)


class LateAcceptance(AcceptanceStrategy):
    kind = StrategyKind.LAHC

    def start(self, fitness: Fitness) -> None:
        self.array = FitnessArray(self.config.history_length, fitness)

    def accept(self, candidate: Fitness, current: Fitness, iteration: int) -> bool:
        array = self.array
        return lahc_accept(candidate, current, array.values[iteration % len(array.values)])

    def update(self, current: Fitness, previous: Fitness, iteration: int) -> None:
        lahc_replace(self.array, iteration % len(self.array.values), current)

    @property
    def threshold(self) -> Fitness:
        return self.array.max_value


class StepCountingHillClimbing(AcceptanceStrategy):
    kind = StrategyKind.SCHC

    def start(self, fitness: Fitness) -> None:
        self.bound = fitness
        self.counter = 0
        self.counter_limit = self.config.history_length
        self.counting = self.config.counting

    def accept(self, candidate: Fitness, current: Fitness, iteration: int) -> bool:
        if not self._counts(candidate, current):
            return schc_accept(candidate, current, self.bound)
        self.counter += 1
        accepted, self.bound = schc_step(candidate, current, self.bound, self.counter_limit, self.counter)
        self.counter %= self.counter_limit
        return accepted

    def _counts(self, candidate: Fitness, current: Fitness) -> bool:
        if self.counting is StepCounting.ALL:
            return True
        if self.counting is StepCounting.ACP:
            return schc_accept(candidate, current, self.bound)
        return candidate < current

    @property
    def threshold(self) -> Fitness:
        return self.bound


class DiversifiedLateAcceptance(AcceptanceStrategy):
    kind = StrategyKind.DLAS

    def start(self, fitness: Fitness) -> None:
        self.array = FitnessArray(self.config.history_length, fitness)

    def accept(self, candidate: Fitness, current: Fitness, iteration: int) -> bool:
        return dlas_accept(candidate, current, self.array.max_value)

    def update(self, current: Fitness, previous: Fitness, iteration: int) -> None:
        dlas_apply_replacement(self.array, iteration % len(self.array.values), current, previous)

    @property
    def threshold(self) -> Fitness:
        return self.array.max_value


STRATEGIES: dict[StrategyKind, type[AcceptanceStrategy]] = {
    StrategyKind.HC: HillClimbing,
    StrategyKind.LAHC: LateAcceptance,
    StrategyKind.SCHC: StepCountingHillClimbing,
    StrategyKind.DLAS: DiversifiedLateAcceptance,
}


def build_strategy(config: StrategyConfig) -> AcceptanceStrategy:
    return STRATEGIES[config.kind](config)


# =============================================================================
# SEARCH LOOP
# =============================================================================

@dataclass(slots=True)
class SearchState:
    current_solution: Any
    current_fitness: Fitness
    previous_fitness: Fitness
    best_solution: Any
    best_fitness: Fitness
    iteration: int = 0


class LocalSearch:
    """One run of the search, advanced an iteration at a time with ``step``."""

    def __init__(self, problem: Problem, strategy: StrategyConfig, rng: RandomStream):
        problem.check_size()
        self.problem = problem
        self.rng = rng
        solution = problem.initial_solution(rng)
        fitness = problem.full_fitness(solution)
        self.state = SearchState(
            current_solution=solution,
            current_fitness=fitness,
            previous_fitness=fitness,
            best_solution=problem.copy_solution(solution),
            best_fitness=fitness,
        )
        self.strategy = build_strategy(strategy)
        self.strategy.start(fitness)
        self.initial_fitness = fitness
        self.accepted = 0
        self.hc_like_iterations = 0
        self.last_best_iteration = 0

    def step(self) -> bool:
        """Run one iteration; returns True when it found a new best solution."""
        state = self.state
        problem = self.problem
        strategy = self.strategy
        k = state.iteration
        current = state.current_fitness
        state.previous_fitness = current

        move = problem.propose_move(state.current_solution, self.rng)
        candidate = current + problem.move_delta(state.current_solution, move)

        new_best = False
        if strategy.accept(candidate, current, k):
            problem.apply_move(state.current_solution, move)
            state.current_fitness = candidate
            self.accepted += 1
            if candidate < state.best_fitness:
                state.best_fitness = candidate
                state.best_solution = problem.copy_solution(state.current_solution)
                self.last_best_iteration = k
                new_best = True

        strategy.update(state.current_fitness, current, k)

        # Until the initial solution has been improved every threshold equals F0 = F*.
        if strategy.is_hc_like(state.best_fitness) and (
            state.best_fitness < self.initial_fitness or strategy.kind is StrategyKind.HC
        ):
            self.hc_like_iterations += 1

        state.iteration = k + 1
        return new_best


class TraceRecorder:
    """Observer that keeps every trace point it is given."""

    def __init__(self) -> None:
        self.points: list[TracePoint] = []

    def __call__(self, point: TracePoint) -> None:
        self.points.append(point)


def run_search(
    problem: Problem,
    strategy: StrategyConfig,
    termination: Termination,
    rng_seed: int,
    observer: Optional[Callable[[TracePoint], None]] = None,
    *,
    trace_period: int = DEFAULT_TRACE_PERIOD,
    best_known: Optional[Fitness] = None,
    run_index: int = 0,
) -> RunRecord:
    """Run one search until ``termination`` and summarise it.

    ``observer`` receives a TracePoint every ``trace_period`` iterations and on
    every new best.
    """
    if trace_period < 1:
        raise ConfigurationError(f"trace_period must be >= 1, got {trace_period}")
    clock = time.perf_counter
    started = clock()
    search = LocalSearch(problem, strategy, RandomStream(rng_seed))
    state = search.state
    last_best_time = clock() - started

    budget = termination.iteration_budget
    cutoff = termination.cutoff_seconds
    stall_fraction = termination.stall_fraction

    while True:
        k = state.iteration
        if budget is not None and k >= budget:
            break
        if cutoff is not None:
            elapsed = clock() - started
            if elapsed >= cutoff:
                break
            if stall_fraction is not None and elapsed - last_best_time >= stall_fraction * elapsed:
                break

        new_best = search.step()
        if new_best:
            last_best_time = clock() - started
            logger.debug("%s %s: new best %d at iteration %d", problem.name, strategy.label, state.best_fitness, k)
        if observer is not None and (new_best or k % trace_period == 0):
            observer(TracePoint(k, clock() - started, state.current_fitness, state.best_fitness))

    elapsed_seconds = clock() - started
    iterations = state.iteration
    hc_like_pct = 100.0 * search.hc_like_iterations / iterations if iterations else 0.0
    return RunRecord(
        instance=problem.name,
        strategy=strategy,
        run_index=run_index,
        seed=rng_seed,
        best_fitness=state.best_fitness,
        deviation=None if best_known is None else state.best_fitness - best_known,
        time_to_last_best=last_best_time,
        last_best_iteration=search.last_best_iteration,
        hc_like_pct=hc_like_pct,
        iterations=iterations,
        accepted=search.accepted,
        elapsed_seconds=elapsed_seconds,
        best_solution=[int(city) for city in state.best_solution],
    )
