from __future__ import annotations

from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import NamedTuple, Optional

from pydantic import BaseModel, Field, model_validator

# =============================================================================
# STRATEGY & TERMINATION SCHEMAS
# =============================================================================

class StrategyKind(str, Enum):
    HC = "hc"
    LAHC = "lahc"
    SCHC = "schc"
    DLAS = "dlas"


class StepCounting(str, Enum):
    """Which iterations advance the SCHC counter."""
    ALL = "all"  # every iteration
    ACP = "acp"  # accepted moves only
    IMP = "imp"  # improving moves only


class StrategyConfig(BaseModel):
    """Acceptance strategy plus its history length (L, or Lc for SCHC)."""
    kind: StrategyKind
    history_length: int = Field(1, ge=1)
    counting: StepCounting = StepCounting.ALL

    @property
    def label(self) -> str:
        if self.kind is StrategyKind.HC:
            return "HC"
        return f"{self.kind.name}(L={self.history_length})"


class Termination(BaseModel):
    """Stopping rule for one run. The first criterion reached wins."""
    cutoff_seconds: Optional[float] = Field(None, gt=0)
    iteration_budget: Optional[int] = Field(None, ge=0)
    # Calibration only: stop once the search has not improved for this
    # fraction of the elapsed time. cutoff_seconds is then the hard ceiling.
    stall_fraction: Optional[float] = Field(None, gt=0, lt=1)

    @model_validator(mode="after")
    def _check_criteria(self) -> "Termination":
        if self.cutoff_seconds is None and self.iteration_budget is None:
            raise ValueError("termination needs cutoff_seconds or iteration_budget")
        if self.stall_fraction is not None and self.cutoff_seconds is None:
            raise ValueError("stall_fraction requires cutoff_seconds as a ceiling")
        return self


# =============================================================================
# RUN RECORD SCHEMAS
# =============================================================================

class TracePoint(NamedTuple):
    iteration: int
    elapsed: float
    current: int
    best: int


class RunRecord(BaseModel):
    """Metrics of a single search run."""
    instance: str
    strategy: StrategyConfig
    run_index: int = 0
    seed: int
    best_fitness: int
    deviation: Optional[int] = None
    time_to_last_best: float = Field(..., ge=0)
    last_best_iteration: int = 0
    hc_like_pct: float = Field(..., ge=0, le=100)
    iterations: int
    accepted: int
    # Wall-clock length of the run, initialisation included.
    elapsed_seconds: float = 0.0
    best_solution: list[int] = []
    trace: list[TracePoint] = []

    @property
    def label(self) -> str:
        return self.strategy.label


class AggregateRow(BaseModel):
    """Per-strategy means over the runs of one experiment."""
    strategy: StrategyConfig
    runs: int
    mean_best_fitness: float
    mean_deviation: Optional[float] = None
    mean_time_to_last_best: float
    mean_hc_like_pct: float
    mean_iterations: float
    # Keyed by the other strategy's label: True when the difference in best
    # fitness is significant under Welch's t-test.
    significant_vs: dict[str, bool] = {}
    t_statistics: dict[str, float] = {}
    winner: bool = False

    @property
    def label(self) -> str:
        return self.strategy.label


# =============================================================================
# EXPERIMENT SCHEMAS
# =============================================================================

class ProblemKind(str, Enum):
    TSP = "tsp"
    QAP = "qap"


class ExperimentSpec(BaseModel):
    """A batch of runs of several strategies on one instance."""
    instance: Path
    kind: Optional[ProblemKind] = None
    strategies: list[StrategyConfig] = Field(..., min_length=1)
    runs_per_config: int = Field(1, ge=1)
    cutoff_seconds: Optional[float] = Field(None, gt=0)
    iteration_budget: Optional[int] = Field(None, ge=0)
    base_seed: int = Field(0, ge=0, lt=2**63)
    best_known: Optional[int] = None
    trace_period: Optional[int] = Field(None, ge=1)
    confidence: float = Field(0.95, gt=0, lt=1)

    @model_validator(mode="after")
    def _check_strategies(self) -> "ExperimentSpec":
        labels = [strategy.label for strategy in self.strategies]
        duplicates = sorted({label for label in labels if labels.count(label) > 1})
        if duplicates:
            raise ValueError(f"strategies listed more than once: {', '.join(duplicates)}")
        return self

    def termination(self) -> Termination:
        return Termination(cutoff_seconds=self.cutoff_seconds, iteration_budget=self.iteration_budget)


class ExperimentResult(BaseModel):
    spec: ExperimentSpec
    instance_name: str
    records: list[RunRecord]
    aggregates: list[AggregateRow]


# =============================================================================
# RESULTS API SCHEMAS
# =============================================================================

class RunResultResponse(BaseModel):
    """A stored run as returned by the results API."""
    id: int
    strategy: StrategyKind
    history_length: int
    counting: StepCounting
    run_index: int
    seed: int
    best_fitness: int
    deviation: Optional[int]
    time_to_last_best: float
    last_best_iteration: int
    hc_like_pct: float
    iterations: int
    accepted: int

    class Config:
        from_attributes = True


class ExperimentSummary(BaseModel):
    id: int
    instance_name: str
    kind: ProblemKind
    base_seed: int
    runs_per_config: int
    cutoff_seconds: Optional[float]
    iteration_budget: Optional[int]
    best_known: Optional[int]
    created_at: datetime

    class Config:
        from_attributes = True


class ExperimentDetail(ExperimentSummary):
    """An experiment together with aggregates recomputed from its stored runs."""
    aggregates: list[AggregateRow] = []


class InstanceInfo(BaseModel):
    name: str
    kind: ProblemKind
    best_known: int
    cutoff_seconds: float
    # Published mean deviation from best_known, keyed by strategy kind.
    published_deviation: dict[str, int] = {}
