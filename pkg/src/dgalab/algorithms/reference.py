"""Sequential oracle and result validation."""

from __future__ import annotations

import heapq
from typing import Sequence

from dgalab.algorithms.common import INFINITY, Distances
from dgalab.graph import EdgeList


def dijkstra_reference(edges: EdgeList, source: int) -> Distances:
    """Binary-heap Dijkstra on the unpartitioned graph."""
    if not 0 <= source < edges.n:
        raise ValueError(f"source {source} out of range [0, {edges.n})")
    adjacency: list[list[tuple[int, int]]] = [[] for _ in range(edges.n)]
    for s, d, w in edges.triples():
        if w < 0:
            raise ValueError(f"Negative weight on edge ({s}, {d})")
        adjacency[s].append((d, w))

    distances: Distances = [INFINITY] * edges.n
    distances[source] = 0
    heap = [(0, source)]
    while heap:
        d, v = heapq.heappop(heap)
        if d > distances[v]:
            continue
        for u, w in adjacency[v]:
            nd = d + w
            if nd < distances[u]:
                distances[u] = nd
                heapq.heappush(heap, (nd, u))
    return distances


def validate(distances: Sequence[float], oracle: Sequence[float]) -> bool:
    """Exact elementwise equality, infinities included."""
    return len(distances) == len(oracle) and all(
        a == b for a, b in zip(distances, oracle)
    )


def count_mismatches(distances: Sequence[float], oracle: Sequence[float]) -> int:
    if len(distances) != len(oracle):
        return max(len(distances), len(oracle))
    return sum(1 for a, b in zip(distances, oracle) if a != b)
