"""Work accounting: useful, useless, rejected and invalidated tasks.

Rejected and invalidated counts are collected online by the algorithms.
Useful and useless work is classified after the run from the processed-task
log and the final distances, so classification never perturbs a run.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import IO, Iterable, Sequence

from dgalab.models import ResultRow

logger = logging.getLogger(__name__)

CSV_COLUMNS: list[str] = list(ResultRow.model_fields)


class ClassificationError(RuntimeError):
    """A processed task carried a distance below the vertex's final distance."""


@dataclass
class WorkStats:
    useful: int = 0
    useless: int = 0
    rejected: int = 0
    invalidated: int = 0
    processed_log: list[tuple[int, int]] = field(default_factory=list)
    full_buffers_sent: int = 0
    partial_buffers_sent: int = 0
    partial_messages_sent: int = 0
    priority_buffers_sent: int = 0
    priority_messages_sent: int = 0
    messages_sent: int = 0
    messages_received: int = 0
    self_sends: int = 0
    cache_drops: int = 0
    seeded: int = 0
    buckets_processed: int = 0
    epochs: int = 0
    completion_time: int = 0
    teps: Fraction = Fraction(0)

    def count_rejected(self) -> None:
        self.rejected += 1

    def count_invalidated(self) -> None:
        self.invalidated += 1

    def record_processed(self, vertex: int, distance: int) -> None:
        self.processed_log.append((vertex, distance))

    @property
    def processed(self) -> int:
        return len(self.processed_log)

    def merge(self, other: WorkStats) -> WorkStats:
        """Commutative sum of two shards; time and TEPS take the maximum."""
        merged = WorkStats()
        for f in fields(self):
            a, b = getattr(self, f.name), getattr(other, f.name)
            if f.name == "processed_log":
                value = a + b
            elif f.name in ("completion_time", "teps"):
                value = max(a, b)
            else:
                value = a + b
            setattr(merged, f.name, value)
        return merged

    @classmethod
    def merge_all(cls, shards: Iterable[WorkStats]) -> WorkStats:
        total = cls()
        for shard in shards:
            total = total.merge(shard)
        return total

    def check_conservation(self, coalescing_size: int) -> list[str]:
        """Return violated counter identities (empty when all hold)."""
        errors = []
        if self.messages_sent != self.messages_received:
            errors.append(
                f"messages_sent={self.messages_sent} != "
                f"messages_received={self.messages_received}"
            )
        buffered = (
            self.full_buffers_sent * coalescing_size
            + self.partial_messages_sent
            + self.priority_messages_sent
        )
        if buffered != self.messages_sent:
            errors.append(
                f"buffer accounting {buffered} != messages_sent={self.messages_sent}"
            )
        if self.useful + self.useless != self.processed:
            errors.append(
                f"useful+useless={self.useful + self.useless} != "
                f"processed={self.processed}"
            )
        tasks = self.rejected + self.invalidated + self.processed
        handled = self.messages_received + self.self_sends + self.seeded
        if tasks != handled:
            errors.append(f"task accounting {tasks} != handled messages {handled}")
        return errors


def classify_work(
    processed_log: Sequence[tuple[int, int]], final_distances: Sequence[float]
) -> tuple[int, int]:
    """Split processed tasks into (useful, useless) against final distances."""
    useful = useless = 0
    for vertex, distance in processed_log:
        final = final_distances[vertex]
        if distance == final:
            useful += 1
        elif distance > final:
            useless += 1
        else:
            raise ClassificationError(
                f"Processed task ({vertex}, {distance}) below final distance {final}"
            )
    return useful, useless


def teps(edge_count_reachable: int, completion_time: int) -> Fraction:
    """Traversed edges per unit of virtual time."""
    if completion_time <= 0:
        return Fraction(0)
    return Fraction(edge_count_reachable, completion_time)


def write_csv(rows: Iterable[ResultRow], stream: IO[str], header: bool = True) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    if header:
        writer.writerow(CSV_COLUMNS)
    for row in rows:
        data = row.model_dump()
        writer.writerow(
            [
                str(data[col]).lower() if isinstance(data[col], bool) else data[col]
                for col in CSV_COLUMNS
            ]
        )
