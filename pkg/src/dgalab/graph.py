"""Graph500-style weighted graphs, 1D block partitioning and per-rank CSR.

Vertices are owned in contiguous blocks of ``ceil(n / p)`` ids. Every directed
edge is stored once, at the owner of its source vertex.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from dgalab.amcore.messages import MAX_DISTANCE
from dgalab.utils import ceil_div, is_power_of_two, next_power_of_two_above

logger = logging.getLogger(__name__)

MAX_SCALE = 30

# Graph500 recursive-matrix initiator (D = 1 - A - B - C = 0.05)
INITIATOR_A = 0.57
INITIATOR_B = 0.19
INITIATOR_C = 0.19


class EdgeListError(ValueError):
    """Malformed or invalid edge-list input."""


@dataclass(frozen=True, eq=False)
class EdgeList:
    n: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    raw_samples: int = 0  # samples drawn before self-loop removal

    def __len__(self) -> int:
        return int(self.src.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EdgeList):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.weight, other.weight)
        )

    @property
    def max_weight(self) -> int:
        return int(self.weight.max()) if len(self) else 0

    def triples(self) -> list[tuple[int, int, int]]:
        return list(zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()))

    def with_unit_weights(self) -> EdgeList:
        return EdgeList(
            n=self.n,
            src=self.src,
            dst=self.dst,
            weight=np.ones_like(self.weight),
            raw_samples=self.raw_samples,
        )

    def reachable_edge_count(self, distances: Sequence[float]) -> int:
        """Number of directed edges whose source vertex was reached."""
        if not len(self):
            return 0
        finite = np.isfinite(np.asarray(distances, dtype=np.float64))
        return int(finite[self.src].sum())


@dataclass(frozen=True, eq=False)
class LocalGraph:
    """CSR fragment owned by one rank: rows for vertices ``lo <= v < hi``."""

    n: int
    num_ranks: int
    rank: int
    lo: int
    hi: int
    row_offsets: np.ndarray
    col: np.ndarray
    weights: np.ndarray
    block: int = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "block", ceil_div(self.n, self.num_ranks))

    @property
    def num_local_vertices(self) -> int:
        return self.hi - self.lo

    @property
    def num_local_edges(self) -> int:
        return int(self.row_offsets[-1])

    def owns(self, v: int) -> bool:
        return self.lo <= v < self.hi

    def owner_of(self, v: int) -> int:
        return v // self.block

    @cached_property
    def _rows(self) -> list[list[tuple[int, int]]]:
        offsets = self.row_offsets.tolist()
        pairs = list(zip(self.col.tolist(), self.weights.tolist()))
        return [pairs[offsets[i] : offsets[i + 1]] for i in range(len(offsets) - 1)]

    def neighbors(self, v: int) -> list[tuple[int, int]]:
        """(target, weight) pairs of an owned vertex's out-edges."""
        return self._rows[v - self.lo]

    def local_edges(self) -> list[tuple[int, int, int]]:
        return [
            (self.lo + i, u, w)
            for i, row in enumerate(self._rows)
            for u, w in row
        ]


def max_path_length(n: int, max_weight: int) -> int:
    """Largest finite shortest distance possible: a simple path over every vertex."""
    return max(n - 1, 0) * max_weight


def owner(v: int, n: int, p: int) -> int:
    """Rank owning vertex ``v`` under the block partition used by partition_1d."""
    return v // ceil_div(n, p)


def _clean(n: int, src: np.ndarray, dst: np.ndarray, weight: np.ndarray, raw: int) -> EdgeList:
    keep = src != dst
    return EdgeList(
        n=n,
        src=src[keep].astype(np.int64),
        dst=dst[keep].astype(np.int64),
        weight=weight[keep].astype(np.int64),
        raw_samples=raw,
    )


def generate_kronecker(scale: int, edgefactor: int, max_weight: int, seed: int) -> EdgeList:
    """Sample ``2^scale * edgefactor`` edges with the Graph500 recursive matrix.

    Self-loops are dropped, duplicates kept. Weights are uniform on
    ``[1, max_weight]``. Equal arguments give byte-identical output.
    """
    if scale < 1 or edgefactor < 1 or max_weight < 1:
        raise ValueError(
            f"scale, edgefactor and max_weight must be >= 1 "
            f"(got {scale}, {edgefactor}, {max_weight})"
        )
    if scale > MAX_SCALE:
        raise ValueError(f"scale {scale} exceeds desk-scale limit {MAX_SCALE}")
    if max_path_length(1 << scale, max_weight) > MAX_DISTANCE:
        raise ValueError(
            f"max_weight={max_weight} at scale {scale} allows distances above {MAX_DISTANCE}"
        )

    n = 1 << scale
    m = n * edgefactor
    rng = np.random.default_rng(seed)

    ab = INITIATOR_A + INITIATOR_B
    c_norm = INITIATOR_C / (1.0 - ab)
    a_norm = INITIATOR_A / ab

    src = np.zeros(m, dtype=np.int64)
    dst = np.zeros(m, dtype=np.int64)
    for bit in range(scale):
        ii_bit = rng.random(m) > ab
        jj_bit = rng.random(m) > np.where(ii_bit, c_norm, a_norm)
        src += ii_bit.astype(np.int64) << bit
        dst += jj_bit.astype(np.int64) << bit
    weight = rng.integers(1, max_weight + 1, size=m, dtype=np.int64)

    edges = _clean(n, src, dst, weight, m)
    logger.debug(
        "Generated scale=%d edgefactor=%d: %d samples, %d after self-loop removal",
        scale,
        edgefactor,
        m,
        len(edges),
    )
    return edges


def partition_1d(edges: EdgeList, num_ranks: int) -> list[LocalGraph]:
    """Split an edge list into one CSR fragment per rank (block 1D)."""
    if num_ranks < 1:
        raise ValueError(f"num_ranks must be >= 1, got {num_ranks}")
    if num_ranks > edges.n:
        raise ValueError(f"num_ranks={num_ranks} exceeds vertex count n={edges.n}")

    block = ceil_div(edges.n, num_ranks)
    order = np.lexsort((edges.weight, edges.dst, edges.src))
    src, dst, weight = edges.src[order], edges.dst[order], edges.weight[order]
    owners = src // block

    graphs = []
    for rank in range(num_ranks):
        lo = min(rank * block, edges.n)
        hi = min(lo + block, edges.n)
        mask = owners == rank
        counts = np.bincount(src[mask] - lo, minlength=hi - lo)
        row_offsets = np.zeros(hi - lo + 1, dtype=np.int64)
        np.cumsum(counts, out=row_offsets[1:])
        graphs.append(
            LocalGraph(
                n=edges.n,
                num_ranks=num_ranks,
                rank=rank,
                lo=lo,
                hi=hi,
                row_offsets=row_offsets,
                col=dst[mask],
                weights=weight[mask],
            )
        )
    return graphs


def pick_sources(edges: EdgeList, count: int, seed: int) -> list[int]:
    """Distinct random search keys among vertices with out-edges."""
    candidates = np.unique(edges.src)
    if candidates.size < count:
        logger.warning(
            "Requested %d sources but only %d vertices have out-edges",
            count,
            candidates.size,
        )
    if candidates.size == 0:
        return [0]
    rng = np.random.default_rng((seed, 1))
    return rng.permutation(candidates)[:count].tolist()


# ──────────────────────────────────────────────
# Edge-list text format
# ──────────────────────────────────────────────


def load_edge_list(path: str | Path) -> EdgeList:
    """Parse "src dst weight" lines; '#' starts a comment line.

    An optional ``# n=<n>`` header fixes the vertex count, otherwise n is the
    smallest power of two exceeding the largest vertex id.
    """
    path = Path(path)
    header_n: int | None = None
    triples: list[tuple[int, int, int]] = []
    try:
        lines = path.read_bytes().splitlines()
    except OSError as e:
        raise EdgeListError(f"Cannot read edge list {path}: {e.strerror}") from None
    for lineno, raw in enumerate(lines, start=1):
        try:
            text = raw.decode("utf-8").strip()
        except UnicodeDecodeError as e:
            raise EdgeListError(f"{path}:{lineno}: not valid UTF-8 ({e.reason})") from None
        if not text:
            continue
        if text.startswith("#"):
            body = text[1:].strip()
            if body.startswith("n="):
                try:
                    header_n = int(body[2:])
                except ValueError:
                    raise EdgeListError(f"{path}:{lineno}: bad header '{text}'") from None
            continue
        if not text.isascii():
            raise EdgeListError(f"{path}:{lineno}: non-ASCII characters in edge line")
        parts = text.split()
        if len(parts) != 3:
            raise EdgeListError(
                f"{path}:{lineno}: expected 'src dst weight', got '{text}'"
            )
        try:
            s, d, w = (int(p) for p in parts)
        except ValueError:
            raise EdgeListError(f"{path}:{lineno}: non-integer field in '{text}'") from None
        if s < 0 or d < 0:
            raise EdgeListError(f"{path}:{lineno}: negative vertex id")
        if w < 0:
            raise EdgeListError(f"{path}:{lineno}: negative weight {w}")
        if w == 0:
            raise EdgeListError(f"{path}:{lineno}: weight must be >= 1")
        if w > MAX_DISTANCE:
            raise EdgeListError(f"{path}:{lineno}: weight {w} exceeds {MAX_DISTANCE}")
        if max(s, d) >= 1 << MAX_SCALE:
            raise EdgeListError(f"{path}:{lineno}: vertex id above 2^{MAX_SCALE}")
        triples.append((s, d, w))

    if not triples:
        raise EdgeListError(f"{path}: no edges")

    arr = np.array(triples, dtype=np.int64)
    max_id = int(arr[:, :2].max())
    n = next_power_of_two_above(max_id)
    if header_n is not None:
        if not is_power_of_two(header_n) or not max_id < header_n <= 1 << MAX_SCALE:
            raise EdgeListError(
                f"{path}: header n={header_n} must be a power of two above {max_id}"
            )
        n = header_n
    heaviest = int(arr[:, 2].max())
    if max_path_length(n, heaviest) > MAX_DISTANCE:
        raise EdgeListError(
            f"{path}: weight {heaviest} over n={n} vertices allows distances above {MAX_DISTANCE}"
        )
    edges = _clean(n, arr[:, 0], arr[:, 1], arr[:, 2], len(triples))
    if not len(edges):
        raise EdgeListError(f"{path}: no edges")
    logger.info("Loaded %d edges (n=%d) from %s", len(edges), n, path)
    return edges


def save_edge_list(edges: EdgeList, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="ascii") as fh:
        fh.write(f"# n={edges.n}\n")
        for s, d, w in edges.triples():
            fh.write(f"{s} {d} {w}\n")
    return path


def scale_of(edges: EdgeList) -> int:
    return int(math.log2(edges.n)) if edges.n > 0 else 0
