from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Any, Callable, Protocol, Sequence, TypeVar

from dgalab.amcore.cache import ReductionCache
from dgalab.amcore.coalescer import Coalescer
from dgalab.amcore.messages import DistanceMessage, deserialize, serialize
from dgalab.metrics import WorkStats
from dgalab.models import RuntimeConfig
from dgalab.simnet import SimNetwork

logger = logging.getLogger(__name__)

T = TypeVar("T")

# handler(rank, message, priority)
Handler = Callable[[int, DistanceMessage, bool], None]


class EpochClosedError(RuntimeError):
    """A message was sent outside an open epoch."""


class LivelockError(RuntimeError):
    """Virtual time passed the configured horizon without termination."""

    def __init__(self, message: str, diagnostics: dict[str, Any]):
        super().__init__(message)
        self.diagnostics = diagnostics


class RankLoop(Protocol):
    """Per-rank loop body driven by ``run_epoch``."""

    def pending(self, rank: int) -> int:
        """Local work queue size; 0 puts the rank into end-of-epoch draining."""
        ...

    def step(self, rank: int) -> None:
        """Run one loop iteration (one task) on ``rank``."""
        ...


@dataclass
class EpochState:
    sent_count: int = 0
    received_count: int = 0


class TerminationDetector:
    """Counting quiescence detection over cooperative reduction rounds.

    A round reduces (Σsent, Σreceived, any-local-work). The epoch ends when a
    round sees Σsent = Σreceived, no local work anywhere, and the same pair as
    the previous round. The epoch opening counts as the first observation.
    """

    def __init__(self) -> None:
        self.rounds = 0
        self._last: tuple[int, int] | None = (0, 0)

    def reset(self) -> None:
        self.rounds = 0
        self._last = (0, 0)

    def observe(self, sent: int, received: int, any_work: bool) -> bool:
        self.rounds += 1
        pair = (sent, received)
        done = not any_work and sent == received and pair == self._last
        self._last = None if any_work else pair
        return done


class ActiveMessageRuntime:
    """Coalescing active-message layer over a ``SimNetwork``.

    Each rank has its own buffers, reduction cache, epoch counters and
    work-stat shard. All ranks are driven cooperatively by ``run_epoch``.
    """

    def __init__(self, config: RuntimeConfig, network: SimNetwork | None = None):
        self.config = config
        self.num_ranks = config.num_ranks
        self.network = network or SimNetwork(config.num_ranks, config.net)
        if self.network.num_ranks != self.num_ranks:
            raise ValueError("Network rank count does not match runtime config")
        self.coalescers = [
            Coalescer(self.num_ranks, config.coalescing_size, config.priority_capacity)
            for _ in range(self.num_ranks)
        ]
        self.caches: list[ReductionCache | None] = [
            ReductionCache(config.cache_capacity) if config.cache_capacity else None
            for _ in range(self.num_ranks)
        ]
        self.epoch = [EpochState() for _ in range(self.num_ranks)]
        self.stats = [WorkStats() for _ in range(self.num_ranks)]
        self.detector = TerminationDetector()
        self._handler: Handler | None = None
        self._loop: RankLoop | None = None
        self._open = False
        self._next_flush = 0

    def register_handler(self, handler: Handler) -> None:
        self._handler = handler

    def _require_handler(self) -> Handler:
        if self._handler is None:
            raise RuntimeError("No message handler registered. Call register_handler() first.")
        return self._handler

    @property
    def epoch_open(self) -> bool:
        return self._open

    # ──────────────────────────────────────────
    # Sending
    # ──────────────────────────────────────────

    def cache_filter(self, rank: int, msg: DistanceMessage) -> bool:
        """True to send, False to drop; always True when caching is disabled."""
        cache = self.caches[rank]
        if cache is None:
            return True
        if cache.filter(msg):
            return True
        self.stats[rank].cache_drops += 1
        return False

    def am_send(
        self, rank: int, msg: DistanceMessage, dst_rank: int, priority: bool = False
    ) -> None:
        if not self._open:
            raise EpochClosedError(f"Rank {rank} sent {msg} outside an open epoch")
        if dst_rank == rank and self.config.self_send_check:
            self.stats[rank].self_sends += 1
            # local delivery needs no priority channel
            self._require_handler()(rank, msg, False)
            return
        if not self.cache_filter(rank, msg):
            return
        priority = priority and self.config.priority_messages
        full = self.coalescers[rank].append(dst_rank, msg, priority)
        if full is not None:
            self._submit(rank, dst_rank, full, priority)

    def _submit(
        self, rank: int, dst_rank: int, messages: list[DistanceMessage], priority: bool
    ) -> None:
        self.network.submit_send(rank, dst_rank, serialize(messages), priority=priority)
        self.epoch[rank].sent_count += len(messages)
        self.stats[rank].messages_sent += len(messages)

    def flush_partials(self, rank: int) -> int:
        """Submit every non-empty buffer of ``rank``; returns buffers sent."""
        drained = self.coalescers[rank].drain_partials()
        for dst_rank, messages, priority in drained:
            self._submit(rank, dst_rank, messages, priority)
        return len(drained)

    # ──────────────────────────────────────────
    # Receiving
    # ──────────────────────────────────────────

    def progress(self, rank: int) -> int:
        """Handle every envelope delivered to ``rank``; priority envelopes first."""
        handler = self._require_handler()
        handled = 0
        for envelope in self.network.receive(rank):
            messages = deserialize(envelope.payload)
            for msg in messages:
                handler(rank, msg, envelope.priority)
            handled += len(messages)
        if handled:
            self.epoch[rank].received_count += handled
            self.stats[rank].messages_received += handled
        return handled

    # ──────────────────────────────────────────
    # Epochs
    # ──────────────────────────────────────────

    def _has_local_work(self, rank: int) -> bool:
        assert self._loop is not None
        return (
            self._loop.pending(rank) > 0
            or self.coalescers[rank].buffered > 0
            or self.network.has_mail(rank)
        )

    def detect_termination(self) -> bool:
        """One reduction round over all ranks, costed as a barrier."""
        sent = sum(e.sent_count for e in self.epoch)
        received = sum(e.received_count for e in self.epoch)
        any_work = any(self._has_local_work(rank) for rank in range(self.num_ranks))
        self.network.full_barrier()
        done = self.detector.observe(sent, received, any_work)
        logger.debug(
            "Termination round %d at t=%d: sent=%d received=%d work=%s -> %s",
            self.detector.rounds,
            self.network.now(),
            sent,
            received,
            any_work,
            done,
        )
        return done

    def _diagnostics(self) -> dict[str, Any]:
        return {
            "time": self.network.now(),
            "in_flight": self.network.in_flight,
            "pending": [self._loop.pending(r) for r in range(self.num_ranks)]
            if self._loop
            else [],
            "buffered": [c.buffered for c in self.coalescers],
            "sent": [e.sent_count for e in self.epoch],
            "received": [e.received_count for e in self.epoch],
            "rounds": self.detector.rounds,
        }

    def _maybe_flush(self) -> None:
        now = self.network.now()
        if now < self._next_flush:
            return
        for rank in range(self.num_ranks):
            self.flush_partials(rank)
        self._next_flush = now + self.config.flush_period

    def run_epoch(self, loop: RankLoop) -> int:
        """Drive ``loop`` on every rank until global termination.

        Each scheduler tick gives every rank with local work one iteration,
        then advances virtual time by ``task_cost``. A rank progresses after
        every ``ee`` iterations, or every iteration while its queue is
        smaller than ``el``. Ranks without work drain: flush partial buffers
        and progress. When all ranks drain, a termination round runs.

        Returns the virtual time at which the epoch ended.
        """
        self._require_handler()
        cfg = self.config
        net = self.network
        self._loop = loop
        self._open = True
        self.detector.reset()
        for state in self.epoch:
            state.sent_count = state.received_count = 0
        iterations = [0] * self.num_ranks
        self._next_flush = net.now() + cfg.flush_period

        try:
            while True:
                if net.now() > cfg.horizon:
                    raise LivelockError(
                        f"Epoch exceeded horizon {cfg.horizon} without terminating",
                        self._diagnostics(),
                    )
                worked = False
                for rank in range(self.num_ranks):
                    if loop.pending(rank) > 0:
                        loop.step(rank)
                        worked = True
                        iterations[rank] += 1
                        if iterations[rank] % cfg.ee == 0 or loop.pending(rank) < cfg.el:
                            self.progress(rank)
                    else:
                        self.flush_partials(rank)
                        self.progress(rank)

                if worked:
                    net.poll(net.now() + cfg.task_cost)
                    self._maybe_flush()
                    continue

                if self.detect_termination():
                    break
                if net.in_flight and not any(
                    net.has_mail(rank) for rank in range(self.num_ranks)
                ):
                    net.poll_next()
        finally:
            self._open = False
            self._loop = None

        for stats in self.stats:
            stats.epochs += 1
        return net.now()

    def allreduce(self, values: Sequence[T], op: Callable[[T, T], T]) -> T:
        """Combine one value per rank; costs one barrier."""
        if len(values) != self.num_ranks:
            raise ValueError(f"Expected {self.num_ranks} values, got {len(values)}")
        self.network.full_barrier()
        return reduce(op, values)

    def collect_stats(self) -> WorkStats:
        """Merge per-rank shards together with buffer counters."""
        for rank, coalescer in enumerate(self.coalescers):
            shard = self.stats[rank]
            shard.full_buffers_sent = coalescer.full_buffers_sent
            shard.partial_buffers_sent = coalescer.partial_buffers_sent
            shard.partial_messages_sent = coalescer.partial_messages_sent
            shard.priority_buffers_sent = coalescer.priority_buffers_sent
            shard.priority_messages_sent = coalescer.priority_messages_sent
        total = WorkStats.merge_all(self.stats)
        total.epochs = max((s.epochs for s in self.stats), default=0)
        total.completion_time = self.network.now()
        return total
