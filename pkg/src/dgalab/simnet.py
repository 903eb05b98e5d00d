"""Deterministic discrete-event transport between simulated ranks.

A ``simpy.Environment`` owns the virtual clock. Every envelope is one
timeout event that fires at its delivery time and drops the envelope into
the destination mailbox; simpy breaks time ties by scheduling order, so
same-instant deliveries keep submission order. Sends never block:
``submit_send`` schedules the event and returns. Delivery cost follows an
additive eager/rendezvous model.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from itertools import count
from typing import Collection, Iterator

import simpy
from simpy.core import Infinity

from dgalab.models import NetConfig
from dgalab.utils import ceil_div

logger = logging.getLogger(__name__)


class NetworkFault(RuntimeError):
    """Invalid use of the transport (bad rank, empty payload, closed network)."""


class DeadlockError(RuntimeError):
    """The event queue went idle while a barrier was still incomplete."""


@dataclass(slots=True)
class Envelope:
    src: int
    dst: int
    payload: bytes
    inject_time: int
    deliver_time: int
    seq: int
    priority: bool = False


def delivery_delay(nbytes: int, cfg: NetConfig) -> int:
    """Virtual time between injection and delivery of an ``nbytes`` payload."""
    delay = cfg.base_latency + cfg.send_overhead + nbytes * cfg.byte_cost
    if nbytes > cfg.eager_threshold_bytes:
        chunks = ceil_div(nbytes, cfg.eager_threshold_bytes)
        delay += cfg.rendezvous_rtt + (chunks - 1) * cfg.chunk_penalty
    return delay


@dataclass
class Barrier:
    """Release point for a set of ranks, costed as one ``barrier_latency``."""

    network: SimNetwork
    participants: frozenset[int]
    entries: dict[int, int] = field(default_factory=dict)
    release_time: int | None = None
    released: bool = False
    event: simpy.Event | None = None

    @property
    def missing(self) -> set[int]:
        return set(self.participants) - set(self.entries)

    def enter(self, rank: int, at: int | None = None) -> None:
        if rank not in self.participants:
            raise NetworkFault(f"Rank {rank} is not a barrier participant")
        self.entries[rank] = self.network.now() if at is None else at
        if self.missing:
            return
        last = max(self.entries.values())
        if len(self.participants) == 1:
            self.release_time = last
            self.released = True
            return
        now = self.network.now()
        self.release_time = max(last + self.network.config.barrier_latency, now)
        self.event = self.network.env.timeout(self.release_time - now)
        self.event.callbacks.append(self._release)

    def _release(self, _event: simpy.Event) -> None:
        self.released = True


class SimNetwork:
    """Virtual clock, in-flight envelopes and per-rank mailboxes."""

    def __init__(self, num_ranks: int, config: NetConfig | None = None):
        if num_ranks < 1:
            raise NetworkFault(f"num_ranks must be >= 1, got {num_ranks}")
        self.num_ranks = num_ranks
        self.config = config or NetConfig()
        self.env = simpy.Environment(initial_time=0)
        self._seq = count()
        self._flight: dict[int, Envelope] = {}
        self._pair_tail: dict[tuple[int, int], int] = {}
        self._mail: list[deque[Envelope]] = [deque() for _ in range(num_ranks)]
        self._priority_mail: list[deque[Envelope]] = [deque() for _ in range(num_ranks)]
        self._closed = False
        self._last_arrival: Envelope | None = None
        self.submitted = 0
        self.delivered = 0
        self.bytes_submitted = 0

    # ──────────────────────────────────────────
    # Clock
    # ──────────────────────────────────────────

    def now(self) -> int:
        return int(self.env.now)

    def next_deadline(self) -> int | None:
        at = self.env.peek()
        return None if at == Infinity else int(at)

    def _advance_to(self, until: int) -> None:
        """Move the clock forward to ``until`` once nothing earlier is pending."""
        if until <= self.env.now:
            return
        tick = self.env.timeout(until - self.now())
        while not tick.processed:
            self.env.step()

    @property
    def in_flight(self) -> int:
        return len(self._flight)

    # ──────────────────────────────────────────
    # Sending and delivery
    # ──────────────────────────────────────────

    def _check_rank(self, rank: int, role: str) -> None:
        if not 0 <= rank < self.num_ranks:
            raise NetworkFault(f"{role} rank {rank} out of range [0, {self.num_ranks})")

    def submit_send(
        self, src: int, dst: int, payload: bytes, priority: bool = False
    ) -> Envelope:
        """Schedule ``payload`` for delivery at ``dst``; the sender never waits."""
        if self._closed:
            raise NetworkFault("Network is closed")
        self._check_rank(src, "Source")
        self._check_rank(dst, "Destination")
        if not payload:
            raise NetworkFault("Empty payload")

        now = self.now()
        deliver = now + delivery_delay(len(payload), self.config)
        # per-pair FIFO: never overtake an earlier envelope on the same pair
        deliver = max(deliver, self._pair_tail.get((src, dst), deliver))
        self._pair_tail[(src, dst)] = deliver

        envelope = Envelope(
            src=src,
            dst=dst,
            payload=bytes(payload),
            inject_time=now,
            deliver_time=deliver,
            seq=next(self._seq),
            priority=priority,
        )
        self._flight[envelope.seq] = envelope
        arrival = self.env.timeout(deliver - now, value=envelope)
        arrival.callbacks.append(self._arrive)
        self.submitted += 1
        self.bytes_submitted += len(payload)
        return envelope

    def _arrive(self, event: simpy.Event) -> None:
        envelope: Envelope = event.value
        del self._flight[envelope.seq]
        self.delivered += 1
        box = self._priority_mail if envelope.priority else self._mail
        box[envelope.dst].append(envelope)
        self._last_arrival = envelope

    def step(self) -> Envelope | None:
        """Deliver the earliest envelope to the caller instead of its mailbox.

        Advances the clock to its delivery time. Returns None when nothing
        is in flight.
        """
        while self._flight:
            self._last_arrival = None
            self.env.step()
            envelope = self._last_arrival
            if envelope is not None:
                box = self._priority_mail if envelope.priority else self._mail
                box[envelope.dst].pop()
                return envelope
        return None

    def poll(self, until: int) -> int:
        """Deliver every event due by ``until`` into mailboxes; clock ends at ``until``."""
        delivered = self.delivered
        while self.env.peek() <= until:
            self.env.step()
        self._advance_to(until)
        return self.delivered - delivered

    def poll_next(self) -> int:
        """Jump to the next event time and deliver everything due then."""
        deadline = self.next_deadline()
        if deadline is None:
            return 0
        return self.poll(deadline)

    def has_mail(self, rank: int) -> bool:
        return bool(self._mail[rank] or self._priority_mail[rank])

    def receive(self, rank: int) -> list[Envelope]:
        """Drain a rank's mailbox: priority envelopes first, then arrival order."""
        envelopes = list(self._priority_mail[rank])
        envelopes.extend(self._mail[rank])
        self._priority_mail[rank].clear()
        self._mail[rank].clear()
        return envelopes

    def iter_in_flight(self) -> Iterator[Envelope]:
        return iter(sorted(self._flight.values(), key=lambda e: (e.deliver_time, e.seq)))

    @property
    def quiescent(self) -> bool:
        return not self._flight and not any(
            self.has_mail(rank) for rank in range(self.num_ranks)
        )

    def close(self) -> None:
        self._closed = True

    # ──────────────────────────────────────────
    # Barriers
    # ──────────────────────────────────────────

    def barrier(self, participants: Collection[int]) -> Barrier:
        members = frozenset(participants)
        if not members:
            raise NetworkFault("Barrier needs at least one participant")
        for rank in members:
            self._check_rank(rank, "Barrier")
        return Barrier(network=self, participants=members)

    def wait(self, barrier: Barrier) -> int:
        """Run the event loop until ``barrier`` releases; returns the release time.

        Envelopes delivered meanwhile land in mailboxes.
        """
        while not barrier.released:
            if self.env.peek() == Infinity:
                raise DeadlockError(
                    f"Event queue idle with incomplete barrier "
                    f"(missing ranks: {sorted(barrier.missing)})"
                )
            self.env.step()
        assert barrier.release_time is not None
        self._advance_to(barrier.release_time)
        return barrier.release_time

    def full_barrier(self) -> int:
        """All ranks enter now and wait for release."""
        barrier = self.barrier(range(self.num_ranks))
        for rank in range(self.num_ranks):
            barrier.enter(rank)
        return self.wait(barrier)
