"""
Pytest configuration and fixtures for tests
Named small graphs plus fresh service instances (no memo shared between tests)
"""
import pytest
import numpy as np

from services.certify_service import CertifyService
from services.density_service import DensityService
from services.graph_service import Graph, enumerate_graphs
from services.oracle_service import OracleService


def cycle(k: int) -> Graph:
    return Graph(k, tuple((i, (i + 1) % k) for i in range(k)))


def path(edges: int) -> Graph:
    return Graph(edges + 1, tuple((i, i + 1) for i in range(edges)))


@pytest.fixture
def k2() -> Graph:
    return Graph(2, ((0, 1),))


@pytest.fixture
def k3() -> Graph:
    return Graph(3, ((0, 1), (0, 2), (1, 2)))


@pytest.fixture
def paw() -> Graph:
    """Triangle 0-1-2 with pendant edge 2-3"""
    return Graph(4, ((0, 1), (0, 2), (1, 2), (2, 3)))


@pytest.fixture
def c4() -> Graph:
    return cycle(4)


@pytest.fixture
def c5() -> Graph:
    return cycle(5)


@pytest.fixture
def cherry() -> Graph:
    """a=0, b=1 nonadjacent with common neighbour c=2"""
    return Graph(3, ((0, 2), (1, 2)))


@pytest.fixture
def diamond() -> Graph:
    """K4 minus the edge 2-3"""
    return Graph(4, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3)))


@pytest.fixture
def bowtie() -> Graph:
    return Graph(5, ((0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)))


@pytest.fixture(scope="session")
def graphs_up_to_5():
    return [g for n in range(1, 6) for g in enumerate_graphs(n)]


@pytest.fixture(scope="session")
def graphs_up_to_6(graphs_up_to_5):
    return graphs_up_to_5 + enumerate_graphs(6)


@pytest.fixture
def density_service() -> DensityService:
    return DensityService()


@pytest.fixture
def certify_service() -> CertifyService:
    return CertifyService()


@pytest.fixture
def oracle_service() -> OracleService:
    return OracleService()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
