"""Experiment drivers: single runs, parameter sweeps and oracle validation.

A run is generate (or load) -> partition -> pick sources -> execute ->
validate -> one ``ResultRow`` per (source, repetition).
"""

from __future__ import annotations

import logging
from multiprocessing import Pool
from typing import Sequence, get_args

from pydantic import ValidationError

from dgalab.algorithms.common import Distances
from dgalab.algorithms.reference import count_mismatches, dijkstra_reference
from dgalab.algorithms.registry import ALGORITHMS, uses_unit_weights
from dgalab.config import ConfigError
from dgalab.graph import (
    EdgeList,
    generate_kronecker,
    load_edge_list,
    partition_1d,
    pick_sources,
    scale_of,
)
from dgalab.metrics import WorkStats
from dgalab.models import (
    AlgorithmType,
    EL_UNBOUNDED,
    ExperimentConfig,
    ExperimentResultModel,
    GraphConfig,
    ResultRow,
    ValidationModel,
    ValidationSummaryModel,
)

logger = logging.getLogger(__name__)


def load_graph(graph: GraphConfig, seed: int) -> EdgeList:
    if graph.path is not None:
        edges = load_edge_list(graph.path)
        logger.info("Loaded %d edges over %d vertices from %s", len(edges), edges.n, graph.path)
    else:
        edges = generate_kronecker(graph.scale, graph.edgefactor, graph.max_weight, seed)
        logger.info(
            "Generated Kronecker graph scale=%d edgefactor=%d: %d edges",
            graph.scale,
            graph.edgefactor,
            len(edges),
        )
    return edges


class OracleCache:
    """Reference distances per (source, unit weights), computed once."""

    def __init__(self, edges: EdgeList):
        self.edges = edges
        self._unit: EdgeList | None = None
        self._cache: dict[tuple[int, bool], Distances] = {}

    def get(self, source: int, unit_weights: bool) -> Distances:
        key = (source, unit_weights)
        if key not in self._cache:
            edges = self.edges
            if unit_weights:
                if self._unit is None:
                    self._unit = edges.with_unit_weights()
                edges = self._unit
            self._cache[key] = dijkstra_reference(edges, source)
        return self._cache[key]


def result_row(cfg: ExperimentConfig, edges: EdgeList, source: int, stats: WorkStats) -> ResultRow:
    rt = cfg.rt
    return ResultRow(
        scale=scale_of(edges) if cfg.graph.path else cfg.graph.scale,
        edgefactor=cfg.graph.edgefactor,
        max_weight=edges.max_weight if cfg.graph.path else cfg.graph.max_weight,
        num_ranks=rt.num_ranks,
        algorithm=cfg.algorithm,
        delta=rt.delta,
        coalescing_size=rt.coalescing_size,
        ee=rt.ee,
        el="inf" if rt.el == EL_UNBOUNDED else rt.el,
        flush_period=rt.flush_period,
        cache_capacity=rt.cache_capacity,
        priority_messages=rt.priority_messages,
        seed=rt.seed,
        source=source,
        completion_time=stats.completion_time,
        teps=float(stats.teps),
        useful=stats.useful,
        useless=stats.useless,
        rejected=stats.rejected,
        invalidated=stats.invalidated,
        messages_sent=stats.messages_sent,
        messages_received=stats.messages_received,
        full_buffers=stats.full_buffers_sent,
        partial_buffers=stats.partial_buffers_sent,
    )


def run_with_graph(
    cfg: ExperimentConfig,
    edges: EdgeList,
    sources: Sequence[int],
    oracles: OracleCache | None = None,
) -> ExperimentResultModel:
    """Run ``cfg`` on an already loaded graph and fixed source list."""
    graphs = partition_1d(edges, cfg.rt.num_ranks)
    algorithm = ALGORITHMS[cfg.algorithm]
    check_oracle = cfg.should_validate(scale_of(edges))
    if not check_oracle:
        logger.warning(
            "Skipping oracle validation at scale %d (set exp.validate=true to enable)",
            scale_of(edges),
        )
    if check_oracle and oracles is None:
        oracles = OracleCache(edges)

    rows: list[ResultRow] = []
    checks: list[ValidationModel] = []
    for source in sources:
        for repetition in range(cfg.repetitions):
            distances, stats = algorithm(graphs, source, cfg.rt)
            errors = stats.check_conservation(cfg.rt.coalescing_size)
            mismatches = 0
            if check_oracle:
                assert oracles is not None
                oracle = oracles.get(source, uses_unit_weights(cfg.algorithm))
                mismatches = count_mismatches(distances, oracle)
            check = ValidationModel(
                algorithm=cfg.algorithm,
                source=source,
                num_ranks=cfg.rt.num_ranks,
                passed=not errors and mismatches == 0,
                mismatches=mismatches,
                conservation_errors=errors,
            )
            if not check.passed:
                logger.warning(
                    "%s from %d (rep %d): %d mismatches, conservation errors %s",
                    cfg.algorithm,
                    source,
                    repetition,
                    mismatches,
                    errors,
                )
            checks.append(check)
            rows.append(result_row(cfg, edges, source, stats))
    return ExperimentResultModel(rows=rows, checks=checks)


def run(cfg: ExperimentConfig) -> ExperimentResultModel:
    edges = load_graph(cfg.graph, cfg.rt.seed)
    sources = pick_sources(edges, cfg.sources, cfg.rt.seed)
    return run_with_graph(cfg, edges, sources)


# ──────────────────────────────────────────────
# Sweeps
# ──────────────────────────────────────────────


def sweep_cells(cfg: ExperimentConfig) -> list[ExperimentConfig]:
    """Every sweep cell as a validated config; a bad combination is a ConfigError."""
    try:
        return list(cfg.cells())
    except ValidationError as e:
        raise ConfigError(f"Invalid sweep combination: {e}") from e


def _graph_key(cfg: ExperimentConfig) -> tuple[GraphConfig, int]:
    return cfg.graph, cfg.rt.seed


def _run_cell(job: tuple[ExperimentConfig, EdgeList, list[int]]) -> ExperimentResultModel:
    cell, edges, sources = job
    return run_with_graph(cell, edges, sources)


def sweep(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResultModel:
    """Run every sweep cell; rows follow axis order regardless of ``jobs``.

    Cells sharing graph parameters and seed reuse one graph and source list.
    """
    cells = sweep_cells(cfg)
    logger.info("Sweep over %s: %d cells", list(cfg.sweep) or "no axes", len(cells))

    # source picks are prefix-stable, so one draw serves every exp.sources value
    max_sources = max(cell.sources for cell in cells)
    workloads: dict[tuple[GraphConfig, int], tuple[EdgeList, list[int]]] = {}
    work: list[tuple[ExperimentConfig, EdgeList, list[int]]] = []
    for cell in cells:
        key = _graph_key(cell)
        if key not in workloads:
            edges = load_graph(cell.graph, cell.rt.seed)
            workloads[key] = (edges, pick_sources(edges, max_sources, cell.rt.seed))
        edges, sources = workloads[key]
        work.append((cell, edges, sources[: cell.sources]))

    if jobs > 1 and len(work) > 1:
        with Pool(processes=min(jobs, len(work))) as pool:
            results = pool.map(_run_cell, work)
    else:
        oracles = {key: OracleCache(edges) for key, (edges, _) in workloads.items()}
        results = [
            run_with_graph(cell, edges, sources, oracles[_graph_key(cell)])
            for cell, edges, sources in work
        ]

    rows: list[ResultRow] = []
    checks: list[ValidationModel] = []
    for result in results:
        rows.extend(result.rows)
        checks.extend(result.checks)
    return ExperimentResultModel(rows=rows, checks=checks)


# ──────────────────────────────────────────────
# Validation
# ──────────────────────────────────────────────


def validate_all(cfg: ExperimentConfig) -> ValidationSummaryModel:
    """Run every algorithm from every source and compare against the oracle."""
    edges = load_graph(cfg.graph, cfg.rt.seed)
    sources = pick_sources(edges, cfg.sources, cfg.rt.seed)
    oracles = OracleCache(edges)
    forced = cfg.with_overrides({"exp.validate": True, "exp.repetitions": 1})
    checks: list[ValidationModel] = []
    for algorithm in get_args(AlgorithmType):
        cell = forced.with_overrides({"exp.algorithm": algorithm})
        checks.extend(run_with_graph(cell, edges, sources, oracles).checks)
    passed = all(check.passed for check in checks)
    logger.info("Validation %s: %d checks", "passed" if passed else "FAILED", len(checks))
    return ValidationSummaryModel(passed=passed, checks=checks)

