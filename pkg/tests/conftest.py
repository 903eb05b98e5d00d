from __future__ import annotations

import numpy as np
import pytest

from dgalab.graph import EdgeList, generate_kronecker
from dgalab.models import NetConfig, RuntimeConfig


def build_edges(n: int, triples: list[tuple[int, int, int]]) -> EdgeList:
    arr = np.array(triples, dtype=np.int64).reshape(-1, 3)
    return EdgeList(n=n, src=arr[:, 0], dst=arr[:, 1], weight=arr[:, 2], raw_samples=len(triples))


def build_config(**overrides) -> RuntimeConfig:
    net = overrides.pop("net", {})
    return RuntimeConfig(net=NetConfig(**net), **overrides)


@pytest.fixture
def make_edges():
    return build_edges


@pytest.fixture
def make_config():
    return build_config


@pytest.fixture
def path_edges() -> EdgeList:
    """0 -> 1 -> 2 -> 3 with weights 1, 2, 1."""
    return build_edges(4, [(0, 1, 1), (1, 2, 2), (2, 3, 1)])


@pytest.fixture
def star_edges() -> EdgeList:
    """Vertex 0 points at every other vertex of an 8-vertex graph."""
    return build_edges(8, [(0, v, 3 + v) for v in range(1, 8)])


@pytest.fixture(scope="session")
def small_graph() -> EdgeList:
    return generate_kronecker(6, 8, 100, seed=3)


@pytest.fixture(scope="session")
def unit_graph() -> EdgeList:
    return generate_kronecker(6, 8, 1, seed=5)


@pytest.fixture(scope="session")
def small_source(small_graph) -> int:
    """A vertex of ``small_graph`` with at least one out-edge."""
    return int(small_graph.src[0])
