"""Caching never changes answers and never adds messages."""

import pytest

from dgalab.algorithms.dc import dc_sssp
from dgalab.graph import generate_kronecker, partition_1d, pick_sources
from dgalab.models import RuntimeConfig


@pytest.mark.parametrize("seed", range(20))
def test_cache_on_off_pair(seed):
    edges = generate_kronecker(7, 16, 100, seed=seed)
    (source,) = pick_sources(edges, 1, seed)
    graphs = partition_1d(edges, 4)
    off = RuntimeConfig(num_ranks=4, seed=seed)
    on = off.model_copy(update={"cache_capacity": 64})

    distances_off, stats_off = dc_sssp(graphs, source, off)
    distances_on, stats_on = dc_sssp(graphs, source, on)

    assert distances_on == distances_off
    assert stats_on.messages_sent <= stats_off.messages_sent
    assert stats_off.cache_drops == 0
