"""DistanceMessage and the coalesced-buffer wire codec.

A buffer is N consecutive 12-byte records: little-endian u64 vertex followed
by little-endian u32 distance, no padding.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

WIRE_DTYPE = np.dtype([("vertex", "<u8"), ("distance", "<u4")])
RECORD_SIZE = WIRE_DTYPE.itemsize  # 12
MAX_DISTANCE = 2**32 - 1


class CorruptPayloadError(ValueError):
    """Payload is not a whole number of wire records."""


class DistanceMessage(NamedTuple):
    vertex: int
    distance: int


def serialize(messages: Sequence[DistanceMessage]) -> bytes:
    for msg in messages:
        if msg.vertex < 0 or not 0 <= msg.distance <= MAX_DISTANCE:
            raise ValueError(f"Message {msg} does not fit the wire format")
    return np.array(messages, dtype=WIRE_DTYPE).tobytes()


def deserialize(payload: bytes) -> list[DistanceMessage]:
    if len(payload) % RECORD_SIZE:
        raise CorruptPayloadError(
            f"Payload of {len(payload)} bytes is not a multiple of {RECORD_SIZE}"
        )
    records = np.frombuffer(payload, dtype=WIRE_DTYPE)
    return [
        DistanceMessage(v, d)
        for v, d in zip(records["vertex"].tolist(), records["distance"].tolist())
    ]
