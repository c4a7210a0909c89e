from __future__ import annotations
from typing import List, Optional
from datetime import datetime, timezone

from sqlalchemy import (
    BigInteger,
    Float,
    ForeignKey,
    String,
)
from sqlalchemy.orm import (
    DeclarativeBase,
    Mapped,
    mapped_column,
    relationship
)

# The base class for all results tables.
class Base(DeclarativeBase):
    pass

# One batch of runs: several strategies, runs_per_config runs each, on one instance.
class Experiment(Base):
    __tablename__ = "experiments"

    id: Mapped[int] = mapped_column(primary_key=True, index=True)
    instance_name: Mapped[str] = mapped_column(String(100), index=True)
    kind: Mapped[str] = mapped_column(String(10)) # "tsp" or "qap"
    base_seed: Mapped[int] = mapped_column(BigInteger)
    runs_per_config: Mapped[int] = mapped_column()
    cutoff_seconds: Mapped[Optional[float]] = mapped_column(Float)
    iteration_budget: Mapped[Optional[int]] = mapped_column(BigInteger)
    best_known: Mapped[Optional[int]] = mapped_column(BigInteger)
    confidence: Mapped[float] = mapped_column(Float, default=0.95)
    created_at: Mapped[datetime] = mapped_column(default=lambda: datetime.now(timezone.utc), index=True)

    # Deleting an experiment deletes its runs.
    runs: Mapped[List["RunResult"]] = relationship(
        back_populates="experiment",
        cascade="all, delete-orphan"
    )

# The summary of a single run; traces and solutions stay in the CSV export.
class RunResult(Base):
    __tablename__ = "run_results"

    id: Mapped[int] = mapped_column(primary_key=True, index=True)
    experiment_id: Mapped[int] = mapped_column(ForeignKey("experiments.id"), index=True)
    strategy: Mapped[str] = mapped_column(String(10)) # "hc", "lahc", "schc", "dlas"
    history_length: Mapped[int] = mapped_column()
    counting: Mapped[str] = mapped_column(String(10), default="all") # SCHC counter variant
    run_index: Mapped[int] = mapped_column()
    seed: Mapped[int] = mapped_column(BigInteger)
    best_fitness: Mapped[int] = mapped_column(BigInteger)
    deviation: Mapped[Optional[int]] = mapped_column(BigInteger)
    time_to_last_best: Mapped[float] = mapped_column(Float)
    last_best_iteration: Mapped[int] = mapped_column(BigInteger)
    hc_like_pct: Mapped[float] = mapped_column(Float)
    iterations: Mapped[int] = mapped_column(BigInteger)
    accepted: Mapped[int] = mapped_column(BigInteger)

    experiment: Mapped["Experiment"] = relationship(back_populates="runs")
