"""Symmetric Euclidean TSP: TSPLIB parsing, tour length and segment reversal."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import NamedTuple, Union

import numpy as np
from numba import njit

from .exceptions import ConfigurationError, InstanceParseError
from .search import Fitness, Problem, RandomStream

logger = logging.getLogger(__name__)


class EdgeWeightKind(str, Enum):
    EUC_2D = "EUC_2D"
    CEIL_2D = "CEIL_2D"


@dataclass(frozen=True, eq=False)
class TspInstance:
    name: str
    coordinates: np.ndarray  # (n, 2) float64
    edge_weight_kind: EdgeWeightKind = EdgeWeightKind.EUC_2D
    comment: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "coordinates", np.ascontiguousarray(self.coordinates, dtype=np.float64))
        if self.coordinates.ndim != 2 or self.coordinates.shape[1] != 2:
            raise ValueError(f"coordinates must have shape (n, 2), got {self.coordinates.shape}")

    @property
    def dimension(self) -> int:
        return self.coordinates.shape[0]

    @property
    def xs(self) -> np.ndarray:
        return np.ascontiguousarray(self.coordinates[:, 0])

    @property
    def ys(self) -> np.ndarray:
        return np.ascontiguousarray(self.coordinates[:, 1])

    @property
    def ceil_rounding(self) -> bool:
        return self.edge_weight_kind is EdgeWeightKind.CEIL_2D

    def distance(self, a: int, b: int) -> Fitness:
        (xa, ya), (xb, yb) = self.coordinates[a], self.coordinates[b]
        return _round_distance(float(xa - xb), float(ya - yb), self.ceil_rounding)


class ReversalMove(NamedTuple):
    """Reverse ``order[i + 1 .. j]`` of the tour, with ``0 <= i < j < n``."""
    i: int
    j: int


def _round_distance(dx: float, dy: float, ceil_rounding: bool) -> int:
    d = math.sqrt(dx * dx + dy * dy)
    if ceil_rounding:
        return int(math.ceil(d))
    return int(math.floor(d + 0.5))


# =============================================================================
# KERNELS
# =============================================================================

@njit(cache=True)
def _edge(xs, ys, a, b, ceil_rounding):
    dx = xs[a] - xs[b]
    dy = ys[a] - ys[b]
    d = math.sqrt(dx * dx + dy * dy)
    if ceil_rounding:
        return np.int64(math.ceil(d))
    return np.int64(math.floor(d + 0.5))


@njit(cache=True)
def _reversal_delta(xs, ys, order, i, j, ceil_rounding):
    n = order.shape[0]
    a = order[i]
    b = order[i + 1]
    c = order[j]
    d = order[(j + 1) % n]
    return (
        _edge(xs, ys, a, c, ceil_rounding)
        + _edge(xs, ys, b, d, ceil_rounding)
        - _edge(xs, ys, a, b, ceil_rounding)
        - _edge(xs, ys, c, d, ceil_rounding)
    )


@njit(cache=True)
def _reverse_segment(order, i, j):
    lo = i + 1
    hi = j
    while lo < hi:
        tmp = order[lo]
        order[lo] = order[hi]
        order[hi] = tmp
        lo += 1
        hi -= 1


# =============================================================================
# OPERATIONS
# =============================================================================

def tour_fitness(instance: TspInstance, tour) -> Fitness:
    """Length of the closed tour, rounding each edge by the TSPLIB convention."""
    order = np.asarray(tour, dtype=np.int64)
    following = np.roll(order, -1)
    coords = instance.coordinates
    dx = coords[order, 0] - coords[following, 0]
    dy = coords[order, 1] - coords[following, 1]
    lengths = np.sqrt(dx * dx + dy * dy)
    rounded = np.ceil(lengths) if instance.ceil_rounding else np.floor(lengths + 0.5)
    return int(rounded.astype(np.int64).sum())


def propose_reversal(tour, rng: RandomStream) -> ReversalMove:
    """Cut the tour at two uniformly chosen positions."""
    n = len(tour)
    if n < TspProblem.min_size:
        raise ConfigurationError(f"segment reversal needs at least {TspProblem.min_size} cities, got {n}")
    i, j = rng.pair_below(n)
    if i > j:
        i, j = j, i
    return ReversalMove(i, j)


def reversal_delta(instance: TspInstance, tour: np.ndarray, move: ReversalMove) -> Fitness:
    return int(_reversal_delta(instance.xs, instance.ys, tour, move.i, move.j, instance.ceil_rounding))


def apply_reversal(tour: np.ndarray, move: ReversalMove) -> None:
    _reverse_segment(tour, move.i, move.j)


class TspProblem(Problem[np.ndarray, ReversalMove]):
    min_size = 4

    def __init__(self, instance: TspInstance):
        self.instance = instance
        # Contiguous copies for the kernels, built once per problem.
        self._xs = instance.xs
        self._ys = instance.ys
        self._ceil = instance.ceil_rounding

    @property
    def name(self) -> str:
        return self.instance.name

    @property
    def size(self) -> int:
        return self.instance.dimension

    def initial_solution(self, rng: RandomStream) -> np.ndarray:
        return rng.permutation(self.instance.dimension)

    def full_fitness(self, solution: np.ndarray) -> Fitness:
        return tour_fitness(self.instance, solution)

    def propose_move(self, solution: np.ndarray, rng: RandomStream) -> ReversalMove:
        return propose_reversal(solution, rng)

    def move_delta(self, solution: np.ndarray, move: ReversalMove) -> Fitness:
        return int(_reversal_delta(self._xs, self._ys, solution, move.i, move.j, self._ceil))

    def apply_move(self, solution: np.ndarray, move: ReversalMove) -> None:
        _reverse_segment(solution, move.i, move.j)


# =============================================================================
# TSPLIB FORMAT
# =============================================================================

def parse_tsplib(text: Union[bytes, str], name: str = "") -> TspInstance:
    """Read the EUC_2D / CEIL_2D subset of the TSPLIB format."""
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")

    header: dict[str, str] = {}
    lines = text.splitlines()
    line_no = 0
    in_coords = False
    coords: dict[int, tuple[float, float]] = {}
    dimension = None

    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line == "EOF":
            break
        if not in_coords:
            if line.startswith("NODE_COORD_SECTION"):
                dimension = _check_header(header, line_no)
                in_coords = True
                continue
            key, sep, value = line.partition(":")
            if not sep:
                raise InstanceParseError("expected 'KEYWORD : value'", line_no, raw)
            key = key.strip().upper()
            header[key] = value.strip()
            if key not in ("NAME", "TYPE", "COMMENT", "DIMENSION", "EDGE_WEIGHT_TYPE"):
                logger.debug("ignoring TSPLIB keyword %s on line %d", key, line_no)
            continue

        parts = line.split()
        if len(parts) != 3:
            raise InstanceParseError("malformed coordinate line", line_no, raw)
        try:
            node = int(parts[0])
            x, y = float(parts[1]), float(parts[2])
        except ValueError:
            raise InstanceParseError("malformed coordinate line", line_no, raw) from None
        if not 1 <= node <= dimension:
            raise InstanceParseError(f"node id {node} outside 1..{dimension}", line_no, raw)
        if node in coords:
            raise InstanceParseError(f"duplicate node id {node}", line_no, raw)
        coords[node] = (x, y)

    if not in_coords:
        raise InstanceParseError("missing NODE_COORD_SECTION", line_no)
    if len(coords) != dimension:
        raise InstanceParseError(f"DIMENSION is {dimension} but {len(coords)} coordinates were given", line_no)

    return TspInstance(
        name=header.get("NAME") or name,
        coordinates=np.array([coords[node] for node in range(1, dimension + 1)], dtype=np.float64),
        edge_weight_kind=EdgeWeightKind(header["EDGE_WEIGHT_TYPE"]),
        comment=header.get("COMMENT", ""),
    )


def _check_header(header: dict[str, str], line_no: int) -> int:
    problem_type = header.get("TYPE", "TSP")
    if problem_type != "TSP":
        raise InstanceParseError(f"unsupported TYPE {problem_type!r}", line_no)
    weight_type = header.get("EDGE_WEIGHT_TYPE")
    if weight_type not in EdgeWeightKind.__members__:
        raise InstanceParseError(f"unsupported EDGE_WEIGHT_TYPE {weight_type!r}", line_no)
    try:
        dimension = int(header["DIMENSION"])
    except (KeyError, ValueError):
        raise InstanceParseError("missing or invalid DIMENSION", line_no) from None
    if dimension < 3:
        raise InstanceParseError(f"DIMENSION must be at least 3, got {dimension}", line_no)
    return dimension


def serialize_tsplib(instance: TspInstance) -> str:
    lines = [f"NAME : {instance.name}", "TYPE : TSP"]
    if instance.comment:
        lines.append(f"COMMENT : {instance.comment}")
    lines += [
        f"DIMENSION : {instance.dimension}",
        f"EDGE_WEIGHT_TYPE : {instance.edge_weight_kind.value}",
        "NODE_COORD_SECTION",
    ]
    lines += [f"{node} {x!r} {y!r}" for node, (x, y) in enumerate(instance.coordinates.tolist(), start=1)]
    lines.append("EOF")
    return "\n".join(lines) + "\n"


def load_tsplib(path: Union[str, Path]) -> TspInstance:
    path = Path(path)
    return parse_tsplib(path.read_bytes(), name=path.stem)
