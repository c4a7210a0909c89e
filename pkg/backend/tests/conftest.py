import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Same path setup Alembic's env.py uses: make the 'app' package importable.
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app.qap import QapInstance, QapProblem, serialize_qaplib
from app.tsp import TspInstance, TspProblem, serialize_tsplib

RECTANGLE_TSP = """NAME : rect4
TYPE : TSP
COMMENT : 3 x 4 rectangle
DIMENSION : 4
EDGE_WEIGHT_TYPE : EUC_2D
NODE_COORD_SECTION
1 0 0
2 0 3
3 4 3
4 4 0
EOF
"""

TRIANGLE_TSP = """NAME : tri3
TYPE : TSP
DIMENSION : 3
EDGE_WEIGHT_TYPE : EUC_2D
NODE_COORD_SECTION
1 0 0
2 3 0
3 0 4
EOF
"""

TWO_FACILITY_QAP = "2 0 3 3 0 0 2 2 0"


def make_tsp(n: int, seed: int, name: str = "") -> TspInstance:
    rng = np.random.default_rng(seed)
    coords = rng.integers(0, 1000, size=(n, 2)).astype(np.float64)
    return TspInstance(name=name or f"rand{n}", coordinates=coords)


def make_qap(n: int, seed: int, name: str = "") -> QapInstance:
    """Asymmetric matrices with a non-zero diagonal, the general case of the swap delta."""
    rng = np.random.default_rng(seed)
    return QapInstance(
        name=name or f"rand{n}",
        matrix_a=rng.integers(0, 50, size=(n, n)),
        matrix_b=rng.integers(0, 50, size=(n, n)),
    )


@pytest.fixture
def rectangle_tsp() -> str:
    return RECTANGLE_TSP


@pytest.fixture
def triangle_tsp() -> str:
    return TRIANGLE_TSP


@pytest.fixture
def tsp20() -> TspProblem:
    return TspProblem(make_tsp(20, seed=11, name="rand20"))


@pytest.fixture
def qap12() -> QapProblem:
    return QapProblem(make_qap(12, seed=12, name="rand12"))


@pytest.fixture
def tsp_file(tmp_path) -> Path:
    path = tmp_path / "rand30.tsp"
    path.write_text(serialize_tsplib(make_tsp(30, seed=3, name="rand30")))
    return path


@pytest.fixture
def qap_file(tmp_path) -> Path:
    path = tmp_path / "rand9.dat"
    path.write_text(serialize_qaplib(make_qap(9, seed=4, name="rand9")))
    return path


@pytest.fixture
def db_engine(tmp_path):
    from app.database import init_db, make_engine

    engine = make_engine(f"sqlite:///{tmp_path / 'results.db'}")
    init_db(engine)
    yield engine
    engine.dispose()


@pytest.fixture
def db_session(db_engine):
    from sqlalchemy.orm import sessionmaker

    db = sessionmaker(autocommit=False, autoflush=False, bind=db_engine)()
    try:
        yield db
    finally:
        db.close()


def benchmark_file(name: str) -> Path:
    """A TSPLIB/QAPLIB file from LASBENCH_DATA_DIR; skips the test when absent."""
    data_dir = os.environ.get("LASBENCH_DATA_DIR")
    if not data_dir:
        pytest.skip("LASBENCH_DATA_DIR is not set")
    for candidate in (name, name.lower()):
        path = Path(data_dir) / candidate
        if path.exists():
            return path
    pytest.skip(f"{name} not found in {data_dir}")
