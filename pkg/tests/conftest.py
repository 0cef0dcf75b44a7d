import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from rmvci.core import GraphicMatroid, UniformMatroid, WeightedGraph

settings.register_profile("repo", max_examples=60, deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture
def edge():
    return WeightedGraph(2, ((0, 1, 1.0),))


@pytest.fixture
def triangle():
    return WeightedGraph(3, ((0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)))


@pytest.fixture
def triangle_matroid():
    return GraphicMatroid(((0, 1), (1, 2), (0, 2)))


@pytest.fixture
def k4():
    return WeightedGraph.complete(4), UniformMatroid(4, 2)


def all_masks(n):
    return range(1 << n)


def bits(mask, n):
    return np.array([(mask >> i) & 1 for i in range(n)], dtype=float)
