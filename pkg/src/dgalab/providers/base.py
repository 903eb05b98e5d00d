from __future__ import annotations

import logging
from typing import Any

from dgalab import experiment
from dgalab.config import build_config
from dgalab.graph import generate_kronecker, partition_1d, save_edge_list
from dgalab.models import (
    SWEEP_PREFIX,
    ExperimentConfig,
    ExperimentResultModel,
    GraphSummaryModel,
    ValidationSummaryModel,
    config_key_paths,
)
from dgalab.utils import flatten_mapping

logger = logging.getLogger(__name__)


class LabProvider:
    """Business logic behind the lab's tools.

    Every call starts from ``base`` (defaults, or whatever the server was
    launched with) and layers the caller's flat ``section.key`` overrides.
    """

    def __init__(self, base: ExperimentConfig | None = None):
        self._base = base or ExperimentConfig()

    @property
    def base(self) -> ExperimentConfig:
        return self._base

    def _config(
        self,
        overrides: dict[str, Any] | None = None,
        sweep: dict[str, list[Any]] | None = None,
    ) -> ExperimentConfig:
        layer = flatten_mapping(overrides or {})
        for axis, values in (sweep or {}).items():
            layer[SWEEP_PREFIX + axis] = values
        if not layer:
            return self._base
        return build_config(layer, env={}, base=self._base)

    ##############################################
    # Graphs
    ##############################################

    def generate_graph(
        self,
        scale: int = 10,
        edgefactor: int = 16,
        max_weight: int = 100,
        seed: int = 1,
        num_ranks: int = 1,
        path: str | None = None,
    ) -> GraphSummaryModel:
        """Generate a Graph500 Kronecker graph and optionally save it as an edge list."""
        edges = generate_kronecker(scale, edgefactor, max_weight, seed)
        if path:
            save_edge_list(edges, path)
            logger.info("Wrote %d edges to %s", len(edges), path)
        return GraphSummaryModel(
            n=edges.n,
            edge_count=len(edges),
            max_weight=edges.max_weight,
            path=path,
            rank_edge_counts=[g.num_local_edges for g in partition_1d(edges, num_ranks)],
        )

    ##############################################
    # Experiments
    ##############################################

    def run_experiment(self, overrides: dict[str, Any] | None = None) -> ExperimentResultModel:
        """Run one configuration; returns one row per (source, repetition)."""
        return experiment.run(self._config(overrides))

    def sweep_experiment(
        self,
        sweep: dict[str, list[Any]],
        overrides: dict[str, Any] | None = None,
        jobs: int = 1,
    ) -> ExperimentResultModel:
        """Run the Cartesian product of ``sweep`` axes, e.g. {"rt.coalescing_size": [100, 101]}."""
        return experiment.sweep(self._config(overrides, sweep), jobs=jobs)

    def validate_algorithms(
        self, overrides: dict[str, Any] | None = None
    ) -> ValidationSummaryModel:
        """Compare every algorithm against sequential Dijkstra."""
        return experiment.validate_all(self._config(overrides))

    def list_config_keys(self) -> dict[str, Any]:
        """Every flat config key with its current value."""
        return {key: self._base.get_key(key) for key in sorted(config_key_paths())}
