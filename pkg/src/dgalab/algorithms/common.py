from __future__ import annotations

import dataclasses
import math
from typing import Sequence

import numpy as np

from dgalab.amcore.messages import MAX_DISTANCE
from dgalab.graph import LocalGraph, max_path_length
from dgalab.metrics import WorkStats, classify_work, teps

INFINITY = math.inf

Distances = list[float]


def check_source(graphs: Sequence[LocalGraph], source: int) -> None:
    """Reject a bad source, or weights whose paths could overflow the wire format."""
    if not graphs:
        raise ValueError("No rank graphs given")
    n = graphs[0].n
    if not 0 <= source < n:
        raise ValueError(f"source {source} out of range [0, {n})")
    heaviest = max((int(g.weights.max()) for g in graphs if g.weights.size), default=0)
    if max_path_length(n, heaviest) > MAX_DISTANCE:
        raise ValueError(
            f"Edge weight {heaviest} over n={n} vertices allows distances above {MAX_DISTANCE}"
        )


def unit_weight_graphs(graphs: Sequence[LocalGraph]) -> list[LocalGraph]:
    return [dataclasses.replace(g, weights=np.ones_like(g.weights)) for g in graphs]


def gather_distances(
    graphs: Sequence[LocalGraph], tentative: Sequence[list[float]]
) -> Distances:
    """Concatenate per-rank tentative arrays into one global distance list."""
    distances: Distances = [INFINITY] * graphs[0].n
    for graph, local in zip(graphs, tentative):
        distances[graph.lo : graph.hi] = local
    return distances


def reachable_edges(graphs: Sequence[LocalGraph], distances: Distances) -> int:
    total = 0
    for graph in graphs:
        degrees = np.diff(graph.row_offsets)
        finite = np.isfinite(np.asarray(distances[graph.lo : graph.hi], dtype=np.float64))
        total += int(degrees[finite].sum())
    return total


def finish_stats(
    stats: WorkStats, graphs: Sequence[LocalGraph], final: Distances
) -> WorkStats:
    """Classify processed work and compute TEPS once distances are final."""
    stats.useful, stats.useless = classify_work(stats.processed_log, final)
    stats.teps = teps(reachable_edges(graphs, final), stats.completion_time)
    return stats
