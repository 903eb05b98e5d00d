from __future__ import annotations

from typing import Callable, Sequence

from dgalab.algorithms.common import Distances
from dgalab.algorithms.dc import dc_bfs, dc_sssp
from dgalab.algorithms.delta_stepping import delta_stepping
from dgalab.graph import LocalGraph
from dgalab.metrics import WorkStats
from dgalab.models import DC_BFS, DC_SSSP, DELTA_STEPPING, AlgorithmType, RuntimeConfig

AlgorithmFn = Callable[
    [Sequence[LocalGraph], int, RuntimeConfig], tuple[Distances, WorkStats]
]

ALGORITHMS: dict[AlgorithmType, AlgorithmFn] = {
    DC_SSSP: dc_sssp,
    DC_BFS: dc_bfs,
    DELTA_STEPPING: delta_stepping,
}


def uses_unit_weights(algorithm: AlgorithmType) -> bool:
    return algorithm == DC_BFS
