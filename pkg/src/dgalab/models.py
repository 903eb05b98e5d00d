from __future__ import annotations

import itertools
import sys
from typing import Any, Iterator, Literal, get_args

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from dgalab.amcore.messages import MAX_DISTANCE

AlgorithmType = Literal["dc-sssp", "dc-bfs", "delta-stepping"]
DC_SSSP, DC_BFS, DELTA_STEPPING = get_args(AlgorithmType)

# `rt.el=inf` maps here: every iteration sees a queue smaller than this.
EL_UNBOUNDED = sys.maxsize


# ──────────────────────────────────────────────
# Configuration Models
# ──────────────────────────────────────────────


class NetConfig(BaseModel):
    """Cost model of the simulated transport, in virtual-time units.

    Payloads above ``eager_threshold_bytes`` switch to the rendezvous
    protocol: one extra round trip plus a penalty for every additional
    threshold-sized chunk.
    """

    model_config = ConfigDict(frozen=True)

    base_latency: int = Field(default=5000, ge=0)
    byte_cost: int = Field(default=1, ge=0)
    send_overhead: int = Field(default=500, ge=0)
    eager_threshold_bytes: int = Field(default=524288, gt=0)
    rendezvous_rtt: int = Field(default=10000, ge=0)
    chunk_penalty: int = Field(default=2000, ge=0)
    barrier_latency: int = Field(default=1000, ge=0)


class RuntimeConfig(BaseModel):
    """Tunable parameter space of the active-message runtime."""

    model_config = ConfigDict(frozen=True)

    coalescing_size: int = Field(default=256, ge=1)
    flush_period: int = Field(default=2000, ge=1)
    ee: int = Field(default=22, ge=1)
    el: int = Field(default=16, ge=0)
    cache_capacity: int = Field(default=0, ge=0)
    priority_messages: bool = False
    self_send_check: bool = True
    delta: int = Field(default=32, ge=1)
    net: NetConfig = NetConfig()
    seed: int = Field(default=1, ge=0)
    num_ranks: int = Field(default=4, ge=1)
    task_cost: int = Field(default=100, ge=1)  # virtual time per loop iteration
    horizon: int = Field(default=10**12, ge=1)  # livelock guard

    @field_validator("el", mode="before")
    @classmethod
    def parse_unbounded_el(cls, v: Any) -> Any:
        if isinstance(v, str) and v.strip().lower() in ("inf", "infinity", "unbounded"):
            return EL_UNBOUNDED
        if isinstance(v, float) and v == float("inf"):
            return EL_UNBOUNDED
        return v

    @property
    def priority_capacity(self) -> int:
        return max(1, self.coalescing_size // 16)


class GraphConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    scale: int = Field(default=10, ge=1, le=30)
    edgefactor: int = Field(default=16, ge=1)
    max_weight: int = Field(default=100, ge=1)
    path: str | None = None  # load an edge-list file instead of generating

    @model_validator(mode="after")
    def check_distances_fit_wire(self) -> GraphConfig:
        if self.path is None and (2**self.scale - 1) * self.max_weight > MAX_DISTANCE:
            raise ValueError(
                f"graph.max_weight={self.max_weight} at scale {self.scale} allows "
                f"distances above {MAX_DISTANCE}"
            )
        return self


# Section prefix -> attribute path inside ExperimentConfig.
CONFIG_SECTIONS: dict[str, tuple[str, ...]] = {
    "graph": ("graph",),
    "rt": ("rt",),
    "net": ("rt", "net"),
    "exp": (),
}

SWEEP_PREFIX = "sweep."
VALIDATE_MAX_SCALE = 16


def _section_fields(section: str) -> list[str]:
    model: type[BaseModel] = {
        "graph": GraphConfig,
        "rt": RuntimeConfig,
        "net": NetConfig,
        "exp": ExperimentConfig,
    }[section]
    skip = {"rt": {"net"}, "exp": {"graph", "rt", "sweep"}}.get(section, set())
    return [
        field.alias or name
        for name, field in model.model_fields.items()
        if name not in skip
    ]


def config_key_paths() -> dict[str, tuple[str, ...]]:
    """Map every flat config key (``rt.ee``) to its attribute path."""
    return {
        f"{section}.{name}": (*prefix, name)
        for section, prefix in CONFIG_SECTIONS.items()
        for name in _section_fields(section)
    }


class ExperimentConfig(BaseModel):
    """One experiment: graph, runtime parameters, algorithm and sweep axes."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    graph: GraphConfig = GraphConfig()
    rt: RuntimeConfig = RuntimeConfig()
    algorithm: AlgorithmType = DC_SSSP
    sources: int = Field(default=1, ge=1)
    repetitions: int = Field(default=1, ge=1)
    validate_results: bool | None = Field(default=None, alias="validate")
    sweep: dict[str, list[Any]] = {}

    @field_validator("sweep")
    @classmethod
    def check_sweep_axes(cls, v: dict[str, list[Any]]) -> dict[str, list[Any]]:
        valid = config_key_paths()
        for key, values in v.items():
            if key not in valid:
                raise ValueError(
                    f"Unknown sweep axis '{key}'. Valid keys: {', '.join(sorted(valid))}"
                )
            if not values:
                raise ValueError(f"Sweep axis '{key}' has no values")
        return v

    @model_validator(mode="after")
    def check_graph_fits_ranks(self) -> ExperimentConfig:
        if self.graph.path is None and self.rt.num_ranks > 2**self.graph.scale:
            raise ValueError(
                f"rt.num_ranks={self.rt.num_ranks} exceeds vertex count "
                f"2^{self.graph.scale}"
            )
        return self

    def should_validate(self, scale: int | None = None) -> bool:
        """Small graphs are always checked against the oracle; larger ones opt in."""
        scale = self.graph.scale if scale is None else scale
        return scale <= VALIDATE_MAX_SCALE or bool(self.validate_results)

    def get_key(self, key: str) -> Any:
        node: Any = self
        for attr in config_key_paths()[key]:
            node = getattr(node, attr if attr != "validate" else "validate_results")
        return node

    def with_overrides(self, overrides: dict[str, Any]) -> ExperimentConfig:
        """Return a copy with flat ``section.key`` overrides applied and validated."""
        paths = config_key_paths()
        data = self.model_dump(by_alias=True)
        for key, value in overrides.items():
            if key not in paths:
                raise KeyError(key)
            node = data
            *parents, leaf = paths[key]
            for attr in parents:
                node = node[attr]
            node[leaf] = value
        return ExperimentConfig.model_validate(data)

    def cells(self) -> Iterator[ExperimentConfig]:
        """Cartesian product of the sweep axes; the last axis varies fastest."""
        axes = list(self.sweep)
        for combo in itertools.product(*(self.sweep[axis] for axis in axes)):
            yield self.with_overrides(dict(zip(axes, combo))).model_copy(update={"sweep": {}})


# ──────────────────────────────────────────────
# Result Models
# ──────────────────────────────────────────────


class ResultRow(BaseModel):
    """One CSV row. Field order is the CSV column order."""

    scale: int
    edgefactor: int
    max_weight: int
    num_ranks: int
    algorithm: AlgorithmType
    delta: int
    coalescing_size: int
    ee: int
    el: int | Literal["inf"]  # "inf" when unbounded, as accepted by rt.el
    flush_period: int
    cache_capacity: int
    priority_messages: bool
    seed: int
    source: int
    completion_time: int
    teps: float
    useful: int
    useless: int
    rejected: int
    invalidated: int
    messages_sent: int
    messages_received: int
    full_buffers: int
    partial_buffers: int


class ValidationModel(BaseModel):
    """Outcome of comparing one algorithm run against the oracle."""

    algorithm: AlgorithmType
    source: int
    num_ranks: int
    passed: bool
    mismatches: int = 0
    conservation_errors: list[str] = []


class ValidationSummaryModel(BaseModel):
    passed: bool
    checks: list[ValidationModel]


class GraphSummaryModel(BaseModel):
    """Result of graph generation or loading."""

    n: int
    edge_count: int
    max_weight: int
    path: str | None = None
    rank_edge_counts: list[int] = []


class ExperimentResultModel(BaseModel):
    """Rows of a run or sweep plus every oracle/conservation check made."""

    rows: list[ResultRow]
    checks: list[ValidationModel] = []

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)
