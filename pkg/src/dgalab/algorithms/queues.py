from __future__ import annotations

import heapq


class LocalWorkQueue:
    """Private min-priority working set of (distance, vertex) tasks."""

    def __init__(self) -> None:
        self._heap: list[tuple[int, int]] = []

    def __len__(self) -> int:
        return len(self._heap)

    def push(self, distance: int, vertex: int) -> None:
        heapq.heappush(self._heap, (distance, vertex))

    def pop(self) -> tuple[int, int]:
        return heapq.heappop(self._heap)

    def peek_distance(self) -> int | None:
        return self._heap[0][0] if self._heap else None


class BucketStore:
    """Dynamic-array buckets: bucket ``i`` holds entries with ``i*delta <= d < (i+1)*delta``.

    Entries are (vertex, distance) pairs. An entry whose distance was later
    improved stays in place and is discarded when met.
    """

    def __init__(self, delta: int):
        if delta < 1:
            raise ValueError(f"delta must be >= 1, got {delta}")
        self.delta = delta
        self._buckets: list[list[tuple[int, int]]] = []
        self.current: int | None = None

    def index_of(self, distance: int) -> int:
        return distance // self.delta

    def insert(self, vertex: int, distance: int) -> int:
        index = self.index_of(distance)
        if index >= len(self._buckets):
            self._buckets.extend([] for _ in range(index + 1 - len(self._buckets)))
        self._buckets[index].append((vertex, distance))
        return index

    def size(self, index: int) -> int:
        return len(self._buckets[index]) if index < len(self._buckets) else 0

    def pop(self, index: int) -> tuple[int, int]:
        return self._buckets[index].pop()

    def __len__(self) -> int:
        return sum(map(len, self._buckets))

    def purge_stale(self, is_live) -> tuple[int | None, int]:
        """Drop dead entries from the lowest buckets up to the first live one.

        Returns (lowest live bucket index or None, entries dropped).
        """
        dropped = 0
        for index, bucket in enumerate(self._buckets):
            if not bucket:
                continue
            live = [entry for entry in bucket if is_live(*entry)]
            dropped += len(bucket) - len(live)
            self._buckets[index] = live
            if live:
                return index, dropped
        return None, dropped
