"""Benchmark instances with published best-known costs and time cutoffs.

Names are matched case-insensitively, so ``pr1002.tsp`` finds ``Pr1002``.
The published mean deviations are for LAHC and SCHC with L = 50000 and DLAS
with L = 5 (TSP) or L = 10 (QAP), averaged over 50 runs at the listed cutoff.
"""
from __future__ import annotations

import logging
from typing import NamedTuple, Optional

from .exceptions import UnknownInstanceError
from .schemas import InstanceInfo, ProblemKind, StrategyKind

logger = logging.getLogger(__name__)


class BenchmarkInstance(NamedTuple):
    name: str
    kind: ProblemKind
    best_known: int
    cutoff_seconds: float
    # Published mean deviation from best_known: LAHC, SCHC, DLAS.
    published_deviation: tuple[int, int, int]


_TSP = ProblemKind.TSP
_QAP = ProblemKind.QAP

_INSTANCES = [
    BenchmarkInstance("Dsj1000", _TSP, 18659688, 100, (924536, 705626, 339555)),
    BenchmarkInstance("Pr1002", _TSP, 259045, 120, (6265, 6552, 4795)),
    BenchmarkInstance("U1060", _TSP, 224094, 150, (4560, 5647, 4193)),
    BenchmarkInstance("Vm1084", _TSP, 239297, 155, (5884, 6593, 5927)),
    BenchmarkInstance("Pcb1173", _TSP, 56892, 160, (1910, 2118, 1306)),
    BenchmarkInstance("D1291", _TSP, 50801, 165, (2612, 1856, 1404)),
    BenchmarkInstance("Nrw1379", _TSP, 56638, 177, (2024, 2159, 1180)),
    BenchmarkInstance("Fl1400", _TSP, 20127, 180, (290, 324, 901)),
    BenchmarkInstance("U1432", _TSP, 152970, 200, (3513, 4139, 2022)),
    BenchmarkInstance("Fl1577", _TSP, 22249, 250, (466, 524, 634)),
    BenchmarkInstance("D1655", _TSP, 62128, 270, (2424, 2464, 1550)),
    BenchmarkInstance("Vm1748", _TSP, 336556, 280, (10328, 11009, 8967)),
    BenchmarkInstance("U1817", _TSP, 57201, 290, (2320, 2461, 1450)),
    BenchmarkInstance("D2103", _TSP, 80450, 309, (5846, 6137, 2660)),
    BenchmarkInstance("U2152", _TSP, 64253, 320, (2598, 2956, 1350)),
    BenchmarkInstance("U2319", _TSP, 234256, 350, (3625, 3837, 2557)),
    BenchmarkInstance("Pr2392", _TSP, 378032, 370, (19557, 16025, 9003)),
    BenchmarkInstance("Pcb3038", _TSP, 137694, 521, (6530, 7118, 3116)),
    BenchmarkInstance("Fl3795", _TSP, 28772, 1110, (1542, 1547, 1202)),
    BenchmarkInstance("Fnl4461", _TSP, 182566, 1150, (9607, 10558, 3978)),
    BenchmarkInstance("Rl5915", _TSP, 565530, 1200, (36974, 39929, 19232)),
    BenchmarkInstance("Rl5934", _TSP, 556045, 1320, (35718, 38535, 34863)),
    BenchmarkInstance("Pla7397", _TSP, 23260728, 2545, (962561, 990251, 916947)),
    BenchmarkInstance("Lipa80a", _QAP, 253195, 20, (1607, 1564, 1411)),
    BenchmarkInstance("Tai80a", _QAP, 13499184, 21, (330957, 354263, 264177)),
    BenchmarkInstance("Lipa80b", _QAP, 7763962, 26, (39769, 190699, 0)),
    BenchmarkInstance("Tai80b", _QAP, 818415043, 27, (4227835, 3574665, 979737)),
    BenchmarkInstance("Sko81", _QAP, 90998, 24, (222, 178, 113)),
    BenchmarkInstance("Lipa90a", _QAP, 360630, 23, (2045, 2024, 1893)),
    BenchmarkInstance("Lipa90b", _QAP, 12490441, 36, (51015, 20709, 0)),
    BenchmarkInstance("Dre90", _QAP, 1838, 35, (1575, 1615, 1450)),
    BenchmarkInstance("Sko90", _QAP, 115534, 28, (321, 310, 219)),
    BenchmarkInstance("Sko100a", _QAP, 152002, 40, (190, 239, 218)),
    BenchmarkInstance("Tai100a", _QAP, 21052466, 35, (460894, 486157, 378092)),
    BenchmarkInstance("Sko100b", _QAP, 153890, 52, (175, 173, 160)),
    BenchmarkInstance("Tai100b", _QAP, 1185996137, 55, (2711882, 2823207, 5124004)),
    BenchmarkInstance("Sko100c", _QAP, 147862, 42, (147, 132, 121)),
    BenchmarkInstance("Sko100d", _QAP, 149576, 42, (241, 246, 245)),
    BenchmarkInstance("Sko100e", _QAP, 149150, 42, (150, 165, 156)),
    BenchmarkInstance("Sko100f", _QAP, 149036, 42, (237, 232, 204)),
    BenchmarkInstance("Wil100", _QAP, 273038, 35, (149, 171, 241)),
    BenchmarkInstance("Dre110", _QAP, 2264, 37, (2031, 2057, 1782)),
    BenchmarkInstance("Esc128", _QAP, 64, 21, (0, 0, 0)),
    BenchmarkInstance("Dre132", _QAP, 2744, 65, (2522, 2543, 2140)),
    BenchmarkInstance("Tai150b", _QAP, 498896643, 105, (1511339, 1669639, 2641722)),
    BenchmarkInstance("Tho150", _QAP, 8133398, 130, (9615, 9282, 6894)),
    BenchmarkInstance("Tai256c", _QAP, 44759294, 60, (128527, 132333, 134885)),
]

REGISTRY: dict[str, BenchmarkInstance] = {entry.name.lower(): entry for entry in _INSTANCES}

# Best-performing history lengths from the published comparison.
DEFAULT_HISTORY_LENGTH: dict[tuple[StrategyKind, ProblemKind], int] = {
    (StrategyKind.DLAS, ProblemKind.TSP): 5,
    (StrategyKind.DLAS, ProblemKind.QAP): 10,
    (StrategyKind.LAHC, ProblemKind.TSP): 50000,
    (StrategyKind.LAHC, ProblemKind.QAP): 50000,
    (StrategyKind.SCHC, ProblemKind.TSP): 50000,
    (StrategyKind.SCHC, ProblemKind.QAP): 50000,
    (StrategyKind.HC, ProblemKind.TSP): 1,
    (StrategyKind.HC, ProblemKind.QAP): 1,
}

# Strategy and L used for cutoff calibration.
CALIBRATION_HISTORY_LENGTH = 50000
DEFAULT_TRAP_FRACTION = 0.10


def find_instance(name: str) -> Optional[BenchmarkInstance]:
    """Registry entry for ``name`` (file stems and extensions allowed), or None."""
    key = name.strip().lower()
    for suffix in (".tsp", ".dat"):
        if key.endswith(suffix):
            key = key[: -len(suffix)]
    entry = REGISTRY.get(key)
    if entry is None:
        logger.warning("no best-known value bundled for instance %r", name)
    return entry


def best_known_registry(name: str) -> Optional[int]:
    entry = find_instance(name)
    return None if entry is None else entry.best_known


def get_instance(name: str) -> BenchmarkInstance:
    entry = find_instance(name)
    if entry is None:
        raise UnknownInstanceError(name)
    return entry


def default_history_length(strategy: StrategyKind, kind: ProblemKind) -> int:
    return DEFAULT_HISTORY_LENGTH[(strategy, kind)]


_PUBLISHED_STRATEGIES = (StrategyKind.LAHC, StrategyKind.SCHC, StrategyKind.DLAS)


def published_deviation(entry: BenchmarkInstance, strategy: StrategyKind) -> Optional[int]:
    """Published mean deviation of ``strategy`` on ``entry``; None for HC."""
    if strategy not in _PUBLISHED_STRATEGIES:
        return None
    return entry.published_deviation[_PUBLISHED_STRATEGIES.index(strategy)]


def instance_info(entry: BenchmarkInstance) -> InstanceInfo:
    return InstanceInfo(
        name=entry.name,
        kind=entry.kind,
        best_known=entry.best_known,
        cutoff_seconds=entry.cutoff_seconds,
        published_deviation={
            strategy.value: published_deviation(entry, strategy) for strategy in _PUBLISHED_STRATEGIES
        },
    )
