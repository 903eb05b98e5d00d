from __future__ import annotations

from dgalab.amcore.messages import DistanceMessage


class Coalescer:
    """Per-destination message buffers of one rank.

    Normal buffers hold ``capacity`` messages. The priority channel keeps its
    own, smaller buffers so flagged messages leave the rank sooner.
    """

    def __init__(self, num_ranks: int, capacity: int, priority_capacity: int = 1):
        if capacity < 1 or priority_capacity < 1:
            raise ValueError("Buffer capacities must be >= 1")
        self.capacity = capacity
        self.priority_capacity = priority_capacity
        self._buffers: list[list[DistanceMessage]] = [[] for _ in range(num_ranks)]
        self._priority: list[list[DistanceMessage]] = [[] for _ in range(num_ranks)]
        self.full_buffers_sent = 0
        self.partial_buffers_sent = 0
        self.partial_messages_sent = 0
        self.priority_buffers_sent = 0
        self.priority_messages_sent = 0

    @property
    def buffered(self) -> int:
        return sum(map(len, self._buffers)) + sum(map(len, self._priority))

    def buffered_for(self, dst: int) -> int:
        return len(self._buffers[dst]) + len(self._priority[dst])

    def append(
        self, dst: int, msg: DistanceMessage, priority: bool = False
    ) -> list[DistanceMessage] | None:
        """Buffer ``msg``; returns the buffer contents once it reaches capacity."""
        if priority:
            buf = self._priority[dst]
            buf.append(msg)
            if len(buf) < self.priority_capacity:
                return None
            self._priority[dst] = []
            self.priority_buffers_sent += 1
            self.priority_messages_sent += len(buf)
            return buf

        buf = self._buffers[dst]
        buf.append(msg)
        if len(buf) < self.capacity:
            return None
        self._buffers[dst] = []
        self.full_buffers_sent += 1
        return buf

    def drain_partials(self) -> list[tuple[int, list[DistanceMessage], bool]]:
        """Take every non-empty buffer as (dst, messages, priority)."""
        drained = []
        for dst, buf in enumerate(self._priority):
            if buf:
                drained.append((dst, buf, True))
                self._priority[dst] = []
                self.priority_buffers_sent += 1
                self.priority_messages_sent += len(buf)
        for dst, buf in enumerate(self._buffers):
            if buf:
                drained.append((dst, buf, False))
                self._buffers[dst] = []
                self.partial_buffers_sent += 1
                self.partial_messages_sent += len(buf)
        return drained
