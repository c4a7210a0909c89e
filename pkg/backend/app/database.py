import os
from functools import lru_cache

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import sessionmaker

# --- Database Setup ---
# The results store is optional, so nothing connects at import time. The URL is
# read on first use and must come from DATABASE_URL; there is no fallback.
def get_database_url() -> str:
    try:
        return os.environ["DATABASE_URL"]
    except KeyError:
        raise RuntimeError("DATABASE_URL must be set in the environment variables.")

# For SQLite, we need the special argument `check_same_thread`, since FastAPI may
# hand a session to a different thread than the one that created it.
def make_engine(url: str) -> Engine:
    return create_engine(
        url,
        connect_args={"check_same_thread": False} if url.startswith("sqlite") else {}
    )

@lru_cache(maxsize=None)
def get_engine() -> Engine:
    return make_engine(get_database_url())

@lru_cache(maxsize=None)
def get_session_factory() -> sessionmaker:
    return sessionmaker(autocommit=False, autoflush=False, bind=get_engine())

# Creates the tables on a fresh database (tests, `bench --store` on SQLite).
# Long-lived databases are migrated with Alembic instead.
def init_db(engine: Engine | None = None) -> None:
    from .models import Base
    Base.metadata.create_all(bind=engine or get_engine())

# Dependency generator for the API: one session per request, always closed.
def get_db():
    db = get_session_factory()()
    try:
        yield db
    finally:
        db.close()
