from pathlib import Path

import pytest

from blowuplab.ansatz.types import BlowupParams
from blowuplab.cases.runner import PythonCaseRunner
from blowuplab.core.index_parser import IndexFile, load_index
from blowuplab.core.types import RadialGrid


@pytest.fixture(scope="session")
def index() -> IndexFile:
    index_path = Path(__file__) / ".." / ".." / ".." / "index.yaml"
    return load_index(str(index_path.resolve()))


@pytest.fixture(scope="session")
def runner() -> PythonCaseRunner:
    return PythonCaseRunner()


@pytest.fixture(scope="session")
def params() -> BlowupParams:
    # The default tuple satisfies every constraint
    return BlowupParams()


@pytest.fixture(scope="session")
def params_k1() -> BlowupParams:
    return BlowupParams(k=1, A=1.0, T=0.01)


@pytest.fixture(scope="session")
def bubble_grid() -> RadialGrid:
    return RadialGrid.uniform(50.0, 2000)


@pytest.fixture(scope="session")
def eigen_grid() -> RadialGrid:
    return RadialGrid.uniform(40.0, 800)
