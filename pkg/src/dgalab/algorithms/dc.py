"""Distributed Control SSSP and BFS.

Each rank keeps a private priority queue and a slice of the tentative
distances. Relaxations travel as active messages through the unordered
runtime; there are no global barriers, only epoch termination detection.
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
    unit_weight_graphs,
)
from dgalab.algorithms.queues import LocalWorkQueue
from dgalab.amcore.messages import DistanceMessage
from dgalab.amcore.runtime import ActiveMessageRuntime
from dgalab.graph import LocalGraph
from dgalab.metrics import WorkStats
from dgalab.models import RuntimeConfig

logger = logging.getLogger(__name__)


class DistributedControl:
    """One DC-SSSP run over a fresh runtime; implements the ``RankLoop`` protocol."""

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
        self.runtime = runtime or ActiveMessageRuntime(config)
        self.runtime.register_handler(self.handle)
        self.tentative: list[list[float]] = [
            [INFINITY] * g.num_local_vertices for g in self.graphs
        ]
        self.queues = [LocalWorkQueue() for _ in self.graphs]
        self._block = self.graphs[0].block

    # ──────────────────────────────────────────
    # RankLoop
    # ──────────────────────────────────────────

    def pending(self, rank: int) -> int:
        return len(self.queues[rank])

    def step(self, rank: int) -> None:
        distance, vertex = self.queues[rank].pop()
        stats = self.runtime.stats[rank]
        if distance > self.tentative[rank][vertex - self.graphs[rank].lo]:
            stats.count_invalidated()
            return
        stats.record_processed(vertex, distance)
        self._relax(rank, vertex, distance)

    # ──────────────────────────────────────────
    # Relaxation and message handler
    # ──────────────────────────────────────────

    def _relax(self, rank: int, vertex: int, distance: int) -> None:
        runtime = self.runtime
        block = self._block
        use_priority = self.config.priority_messages
        queue = self.queues[rank]
        for target, weight in self.graphs[rank].neighbors(vertex):
            candidate = distance + weight
            priority = False
            if use_priority:
                best = queue.peek_distance()
                priority = best is None or candidate < best
            runtime.am_send(rank, DistanceMessage(target, candidate), target // block, priority)

    def handle(self, rank: int, msg: DistanceMessage, priority: bool) -> None:
        local = self.tentative[rank]
        index = msg.vertex - self.graphs[rank].lo
        if msg.distance >= local[index]:
            self.runtime.stats[rank].count_rejected()
            return
        local[index] = msg.distance
        if priority and self.config.priority_messages:
            # processed on arrival, bypassing the private queue
            self.runtime.stats[rank].record_processed(msg.vertex, msg.distance)
            self._relax(rank, msg.vertex, msg.distance)
        else:
            self.queues[rank].push(msg.distance, msg.vertex)

    # ──────────────────────────────────────────
    # Driver
    # ──────────────────────────────────────────

    def seed(self, source: int) -> None:
        rank = source // self._block
        self.tentative[rank][source - self.graphs[rank].lo] = 0
        self.queues[rank].push(0, source)
        self.runtime.stats[rank].seeded += 1

    def run(self, source: int) -> tuple[Distances, WorkStats]:
        check_source(self.graphs, source)
        self.seed(source)
        end = self.runtime.run_epoch(self)
        distances = gather_distances(self.graphs, self.tentative)
        stats = self.runtime.collect_stats()
        logger.debug(
            "DC from %d finished at t=%d: %d processed, %d messages",
            source,
            end,
            stats.processed,
            stats.messages_sent,
        )
        return distances, finish_stats(stats, self.graphs, distances)


def dc_sssp(
    graphs: Sequence[LocalGraph], source: int, config: RuntimeConfig
) -> tuple[Distances, WorkStats]:
    return DistributedControl(graphs, config).run(source)


def dc_bfs(
    graphs: Sequence[LocalGraph], source: int, config: RuntimeConfig
) -> tuple[Distances, WorkStats]:
    """DC-SSSP with every weight forced to 1: distances are hop counts."""
    return DistributedControl(unit_weight_graphs(graphs), config).run(source)
