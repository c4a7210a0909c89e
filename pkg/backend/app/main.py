from fastapi import FastAPI, Depends, HTTPException, status
from fastapi.middleware.cors import CORSMiddleware
from sqlalchemy.orm import Session

from typing import List, Optional

# ---- Internal Imports ----
from . import crud, registry, schemas, database

# Read-only API over stored experiments. Tables are created by Alembic or by
# `serve`/`bench --store` on first use, never at import time.
app = FastAPI(
    title="lasbench results API",
    description="Stored benchmark experiments of late-acceptance local search strategies.",
    version="1.0.0"
)

# --- CORS Middleware ---
# Lets notebooks and local plotting pages served from another port read results.
origins = [
    "http://localhost:8888", # Jupyter
    "http://localhost:5173",
]

app.add_middleware(
    CORSMiddleware,
    allow_origins=origins,
    allow_credentials=False,
    allow_methods=["GET"],
    allow_headers=["*"],
)

# =============================================================================
# HEALTH CHECK ENDPOINT
# =============================================================================

@app.get("/healthz", status_code=status.HTTP_200_OK)
def health_check():
    """A simple endpoint to confirm the API is running."""
    return {"status": "ok"}

# =============================================================================
# EXPERIMENT ENDPOINTS
# =============================================================================

@app.get("/api/experiments", response_model=List[schemas.ExperimentSummary])
def list_experiments(db: Session = Depends(database.get_db)):
    """All stored experiments, newest first."""
    return crud.get_experiments(db)

@app.get("/api/experiments/{experiment_id}", response_model=schemas.ExperimentDetail)
def read_experiment(experiment_id: int, db: Session = Depends(database.get_db)):
    """
    One experiment with its per-strategy aggregates.
    The aggregates are recomputed from the stored runs, significance flags included.
    """
    db_experiment = crud.get_experiment(db, experiment_id)
    if db_experiment is None:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail="Experiment not found")
    summary = schemas.ExperimentSummary.model_validate(db_experiment)
    return schemas.ExperimentDetail(
        **summary.model_dump(),
        aggregates=crud.experiment_aggregates(db, db_experiment),
    )

@app.get("/api/experiments/{experiment_id}/runs", response_model=List[schemas.RunResultResponse])
def read_runs(experiment_id: int, strategy: Optional[str] = None, db: Session = Depends(database.get_db)):
    """Run records of an experiment, optionally filtered by strategy kind (hc, lahc, schc, dlas)."""
    if crud.get_experiment(db, experiment_id) is None:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail="Experiment not found")
    return crud.get_runs(db, experiment_id, strategy=strategy)

# =============================================================================
# REGISTRY ENDPOINT
# =============================================================================

@app.get("/api/instances/{name}", response_model=schemas.InstanceInfo)
def read_instance(name: str):
    """Published best-known cost and cutoff of a bundled benchmark instance."""
    entry = registry.find_instance(name)
    if entry is None:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=f"Unknown benchmark instance: {name}")
    return registry.instance_info(entry)
