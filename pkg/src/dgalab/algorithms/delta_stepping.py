"""Δ-stepping over the active-message runtime.

Buckets are processed in globally agreed order. For the current bucket,
light edges (w < Δ) are relaxed to a fixpoint in one epoch, then heavy edges
of every vertex removed from the bucket are relaxed once in a second epoch.
"""

from __future__ import annotations

import logging
from typing import Sequence

from dgalab.algorithms.common import (
    INFINITY,
    Distances,
    check_source,
    finish_stats,
    gather_distances,
)
from dgalab.algorithms.queues import BucketStore
from dgalab.amcore.messages import DistanceMessage
from dgalab.amcore.runtime import ActiveMessageRuntime
from dgalab.graph import LocalGraph
from dgalab.metrics import WorkStats
from dgalab.models import RuntimeConfig

logger = logging.getLogger(__name__)


def _min_index(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class _LightPhase:
    """Pops entries of the current bucket and relaxes their light edges."""

    def __init__(self, algo: DeltaStepping):
        self.algo = algo

    def pending(self, rank: int) -> int:
        return self.algo.buckets[rank].size(self.algo.current)

    def step(self, rank: int) -> None:
        algo = self.algo
        vertex, distance = algo.buckets[rank].pop(algo.current)
        stats = algo.runtime.stats[rank]
        if distance > algo.tentative[rank][vertex - algo.graphs[rank].lo]:
            stats.count_invalidated()
            return
        stats.record_processed(vertex, distance)
        algo.removed[rank][vertex] = None
        algo.relax(rank, vertex, distance, light=True)


class _HeavyPhase:
    """Relaxes heavy edges once for every vertex removed from the bucket."""

    def __init__(self, algo: DeltaStepping):
        self.algo = algo
        self._todo = [list(removed) for removed in algo.removed]

    def pending(self, rank: int) -> int:
        return len(self._todo[rank])

    def step(self, rank: int) -> None:
        algo = self.algo
        vertex = self._todo[rank].pop()
        distance = algo.tentative[rank][vertex - algo.graphs[rank].lo]
        algo.relax(rank, vertex, distance, light=False)


class DeltaStepping:
    def __init__(
        self,
        graphs: Sequence[LocalGraph],
        config: RuntimeConfig,
        runtime: ActiveMessageRuntime | None = None,
    ):
        if len(graphs) != config.num_ranks:
            raise ValueError(
                f"Got {len(graphs)} rank graphs for num_ranks={config.num_ranks}"
            )
        self.graphs = list(graphs)
        self.config = config
        self.delta = config.delta
        self.runtime = runtime or ActiveMessageRuntime(config)
        self.runtime.register_handler(self.handle)
        self.tentative: list[list[float]] = [
            [INFINITY] * g.num_local_vertices for g in self.graphs
        ]
        self.buckets = [BucketStore(self.delta) for _ in self.graphs]
        # insertion-ordered set of vertices taken from the current bucket
        self.removed: list[dict[int, None]] = [{} for _ in self.graphs]
        self.current = 0
        self._block = self.graphs[0].block

    def relax(self, rank: int, vertex: int, distance: int, light: bool) -> None:
        runtime = self.runtime
        block = self._block
        delta = self.delta
        for target, weight in self.graphs[rank].neighbors(vertex):
            if (weight < delta) != light:
                continue
            runtime.am_send(rank, DistanceMessage(target, distance + weight), target // block)

    def handle(self, rank: int, msg: DistanceMessage, priority: bool) -> None:
        local = self.tentative[rank]
        index = msg.vertex - self.graphs[rank].lo
        if msg.distance >= local[index]:
            self.runtime.stats[rank].count_rejected()
            return
        local[index] = msg.distance
        self.buckets[rank].insert(msg.vertex, msg.distance)

    def _local_min_bucket(self, rank: int) -> int | None:
        local = self.tentative[rank]
        lo = self.graphs[rank].lo
        index, dropped = self.buckets[rank].purge_stale(
            lambda v, d: d == local[v - lo]
        )
        self.runtime.stats[rank].invalidated += dropped
        return index

    def run(self, source: int) -> tuple[Distances, WorkStats]:
        check_source(self.graphs, source)
        rank = source // self._block
        self.tentative[rank][source - self.graphs[rank].lo] = 0
        self.buckets[rank].insert(source, 0)
        self.runtime.stats[rank].seeded += 1

        buckets_processed = 0
        while True:
            local_mins = [self._local_min_bucket(r) for r in range(len(self.graphs))]
            current = self.runtime.allreduce(local_mins, _min_index)
            if current is None:
                break
            self.current = current
            buckets_processed += 1
            logger.debug("Bucket %d at t=%d", current, self.runtime.network.now())
            for removed in self.removed:
                removed.clear()
            self.runtime.run_epoch(_LightPhase(self))
            self.runtime.run_epoch(_HeavyPhase(self))

        distances = gather_distances(self.graphs, self.tentative)
        stats = self.runtime.collect_stats()
        stats.buckets_processed = buckets_processed
        return distances, finish_stats(stats, self.graphs, distances)


def delta_stepping(
    graphs: Sequence[LocalGraph], source: int, config: RuntimeConfig
) -> tuple[Distances, WorkStats]:
    return DeltaStepping(graphs, config).run(source)
