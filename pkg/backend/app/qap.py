"""Quadratic assignment: QAPLIB parsing, assignment cost and pair swaps.

Cost of a permutation p is sum over i, j of A[i][j] * B[p[i]][p[j]], with A the
first matrix of the file. The swap delta is the usual O(n) expression for
general (asymmetric, non-zero diagonal) matrices.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Union

import numpy as np
from numba import njit

from .exceptions import ConfigurationError, InstanceParseError
from .search import Fitness, Problem, RandomStream


@dataclass(frozen=True, eq=False)
class QapInstance:
    name: str
    matrix_a: np.ndarray  # (n, n) int64
    matrix_b: np.ndarray  # (n, n) int64

    def __post_init__(self) -> None:
        a = np.ascontiguousarray(self.matrix_a, dtype=np.int64)
        b = np.ascontiguousarray(self.matrix_b, dtype=np.int64)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
            raise ValueError(f"matrices must both be n x n, got {a.shape} and {b.shape}")
        object.__setattr__(self, "matrix_a", a)
        object.__setattr__(self, "matrix_b", b)

    @property
    def n(self) -> int:
        return self.matrix_a.shape[0]


class SwapMove(NamedTuple):
    r: int
    s: int


@njit(cache=True)
def _swap_delta(a, b, perm, r, s):
    pr = perm[r]
    ps = perm[s]
    delta = (a[r, r] - a[s, s]) * (b[ps, ps] - b[pr, pr]) + (a[r, s] - a[s, r]) * (b[ps, pr] - b[pr, ps])
    for k in range(perm.shape[0]):
        if k != r and k != s:
            pk = perm[k]
            delta += (a[k, r] - a[k, s]) * (b[pk, ps] - b[pk, pr]) + (a[r, k] - a[s, k]) * (b[ps, pk] - b[pr, pk])
    return delta


def assignment_fitness(instance: QapInstance, assignment) -> Fitness:
    perm = np.asarray(assignment, dtype=np.int64)
    permuted_b = instance.matrix_b[np.ix_(perm, perm)]
    return int((instance.matrix_a * permuted_b).sum())


def propose_swap(assignment, rng: RandomStream) -> SwapMove:
    n = len(assignment)
    if n < QapProblem.min_size:
        raise ConfigurationError(f"swap moves need at least {QapProblem.min_size} facilities, got {n}")
    r, s = rng.pair_below(n)
    return SwapMove(r, s)


def swap_delta(instance: QapInstance, assignment: np.ndarray, move: SwapMove) -> Fitness:
    if move.r == move.s:
        raise ConfigurationError(f"swap needs two distinct positions, got r = s = {move.r}")
    return int(_swap_delta(instance.matrix_a, instance.matrix_b, assignment, move.r, move.s))


def apply_swap(assignment: np.ndarray, move: SwapMove) -> None:
    r, s = move
    assignment[r], assignment[s] = assignment[s], assignment[r]


class QapProblem(Problem[np.ndarray, SwapMove]):
    min_size = 2

    def __init__(self, instance: QapInstance):
        self.instance = instance

    @property
    def name(self) -> str:
        return self.instance.name

    @property
    def size(self) -> int:
        return self.instance.n

    def initial_solution(self, rng: RandomStream) -> np.ndarray:
        return rng.permutation(self.instance.n)

    def full_fitness(self, solution: np.ndarray) -> Fitness:
        return assignment_fitness(self.instance, solution)

    def propose_move(self, solution: np.ndarray, rng: RandomStream) -> SwapMove:
        return propose_swap(solution, rng)

    def move_delta(self, solution: np.ndarray, move: SwapMove) -> Fitness:
        # Moves from propose_swap are always distinct pairs.
        return int(_swap_delta(self.instance.matrix_a, self.instance.matrix_b, solution, move.r, move.s))

    def apply_move(self, solution: np.ndarray, move: SwapMove) -> None:
        apply_swap(solution, move)


# =============================================================================
# QAPLIB FORMAT
# =============================================================================

def parse_qaplib(text: Union[bytes, str], name: str = "") -> QapInstance:
    """Read ``n`` followed by matrices A and B, whitespace separated in any layout."""
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")

    values: list[int] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        for token in raw.split():
            try:
                values.append(int(token))
            except ValueError:
                raise InstanceParseError(f"non-integer token {token!r}", line_no, raw) from None

    if not values:
        raise InstanceParseError("empty QAPLIB file")
    n = values[0]
    if n < 1:
        raise InstanceParseError(f"size must be positive, got {n}", 1)
    expected = 1 + 2 * n * n
    if len(values) != expected:
        raise InstanceParseError(f"expected {expected} integers for n = {n}, found {len(values)}")

    body = np.array(values[1:], dtype=np.int64)
    return QapInstance(
        name=name,
        matrix_a=body[: n * n].reshape(n, n),
        matrix_b=body[n * n :].reshape(n, n),
    )


def serialize_qaplib(instance: QapInstance) -> str:
    rows = [str(instance.n), ""]
    rows += [" ".join(str(v) for v in row) for row in instance.matrix_a.tolist()]
    rows.append("")
    rows += [" ".join(str(v) for v in row) for row in instance.matrix_b.tolist()]
    return "\n".join(rows) + "\n"


def load_qaplib(path: Union[str, Path]) -> QapInstance:
    path = Path(path)
    return parse_qaplib(path.read_bytes(), name=path.stem)
