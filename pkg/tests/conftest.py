import pytest

from legalsys.graph import Graph


@pytest.fixture
def cherry():
    # u1 - v - u2 with v = 1
    return Graph.path(3)


@pytest.fixture
def bowtie():
    # v = 0; u1, u2 = 1, 2; w1, w2 = 3, 4
    return Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (3, 4)])
