from __future__ import annotations

from dgalab.amcore.messages import DistanceMessage


class ReductionCache:
    """Direct-mapped write-through cache of the best distance sent per vertex.

    Slot ``vertex % capacity`` holds one (vertex, distance) pair. A message
    whose vertex is cached with a distance no larger than its own is dropped;
    any other message overwrites the slot and is sent.
    """

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError(f"Cache capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._vertices = [-1] * capacity
        self._distances = [0] * capacity
        self.drops = 0
        self.evictions = 0

    def filter(self, msg: DistanceMessage) -> bool:
        """True if the message passes (and is now cached), False if dropped."""
        slot = msg.vertex % self.capacity
        cached = self._vertices[slot]
        if cached == msg.vertex and self._distances[slot] <= msg.distance:
            self.drops += 1
            return False
        if cached not in (-1, msg.vertex):
            self.evictions += 1
        self._vertices[slot] = msg.vertex
        self._distances[slot] = msg.distance
        return True

    def lookup(self, vertex: int) -> int | None:
        slot = vertex % self.capacity
        if self._vertices[slot] == vertex:
            return self._distances[slot]
        return None
