from typing import Optional

from sqlalchemy.orm import Session

from . import models, schemas
from .harness import aggregate

# =============================================================================
# EXPERIMENT CRUD OPERATIONS
# =============================================================================

def save_experiment(db: Session, result: schemas.ExperimentResult) -> models.Experiment:
    """
    Stores an experiment and one row per run.
    Traces and best solutions are not stored; they live in the exported files.
    """
    spec = result.spec
    db_experiment = models.Experiment(
        instance_name=result.instance_name,
        kind=spec.kind.value if spec.kind else "",
        base_seed=spec.base_seed,
        runs_per_config=spec.runs_per_config,
        cutoff_seconds=spec.cutoff_seconds,
        iteration_budget=spec.iteration_budget,
        best_known=spec.best_known,
        confidence=spec.confidence,
    )
    db_experiment.runs = [
        models.RunResult(
            strategy=record.strategy.kind.value,
            history_length=record.strategy.history_length,
            counting=record.strategy.counting.value,
            run_index=record.run_index,
            seed=record.seed,
            best_fitness=record.best_fitness,
            deviation=record.deviation,
            time_to_last_best=record.time_to_last_best,
            last_best_iteration=record.last_best_iteration,
            hc_like_pct=record.hc_like_pct,
            iterations=record.iterations,
            accepted=record.accepted,
        )
        for record in result.records
    ]
    db.add(db_experiment)
    # Flush so the caller sees the new id. The caller commits, or rolls back
    # if anything after this fails.
    db.flush()
    return db_experiment

def get_experiments(db: Session) -> list[models.Experiment]:
    """All stored experiments, newest first."""
    return (
        db.query(models.Experiment)
        .order_by(models.Experiment.created_at.desc(), models.Experiment.id.desc())
        .all()
    )

def get_experiment(db: Session, experiment_id: int) -> Optional[models.Experiment]:
    return db.query(models.Experiment).filter(models.Experiment.id == experiment_id).first()

def get_runs(db: Session, experiment_id: int, strategy: Optional[str] = None) -> list[models.RunResult]:
    """Runs of one experiment, optionally only those of one strategy kind."""
    query = db.query(models.RunResult).filter(models.RunResult.experiment_id == experiment_id)
    if strategy is not None:
        query = query.filter(models.RunResult.strategy == strategy.lower())
    return query.order_by(
        models.RunResult.strategy,
        models.RunResult.history_length,
        models.RunResult.run_index,
    ).all()

# =============================================================================
# AGGREGATES
# =============================================================================

def run_record(db_run: models.RunResult, instance_name: str) -> schemas.RunRecord:
    return schemas.RunRecord(
        instance=instance_name,
        strategy=schemas.StrategyConfig(
            kind=db_run.strategy,
            history_length=db_run.history_length,
            counting=db_run.counting,
        ),
        run_index=db_run.run_index,
        seed=db_run.seed,
        best_fitness=db_run.best_fitness,
        deviation=db_run.deviation,
        time_to_last_best=db_run.time_to_last_best,
        last_best_iteration=db_run.last_best_iteration,
        hc_like_pct=db_run.hc_like_pct,
        iterations=db_run.iterations,
        accepted=db_run.accepted,
    )

def experiment_aggregates(db: Session, db_experiment: models.Experiment) -> list[schemas.AggregateRow]:
    """Recomputes the per-strategy aggregates from the stored runs."""
    records = [run_record(db_run, db_experiment.instance_name) for db_run in get_runs(db, db_experiment.id)]
    strategies: list[schemas.StrategyConfig] = []
    for record in records:
        if record.strategy not in strategies:
            strategies.append(record.strategy)
    return aggregate(records, strategies, db_experiment.confidence)
