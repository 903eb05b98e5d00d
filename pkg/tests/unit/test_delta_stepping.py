import pytest

from dgalab.algorithms.delta_stepping import delta_stepping
from dgalab.algorithms.queues import BucketStore
from dgalab.algorithms.reference import dijkstra_reference
from dgalab.graph import partition_1d


class TestBucketStore:
    def test_bucket_index(self):
        assert BucketStore(3).index_of(7) == 2
        assert BucketStore(1).index_of(0) == 0

    def test_insert_and_pop(self):
        buckets = BucketStore(4)
        assert buckets.insert(10, 9) == 2
        buckets.insert(11, 8)
        assert buckets.size(2) == 2
        assert buckets.size(5) == 0
        assert buckets.pop(2) == (11, 8)
        assert len(buckets) == 1

    def test_purge_stale_stops_at_first_live_bucket(self):
        buckets = BucketStore(2)
        buckets.insert(0, 1)  # stale
        buckets.insert(1, 4)  # live
        buckets.insert(2, 9)  # stale, beyond the live bucket
        live = {(1, 4)}
        assert buckets.purge_stale(lambda v, d: (v, d) in live) == (2, 1)
        assert len(buckets) == 2

    def test_purge_everything(self):
        buckets = BucketStore(2)
        buckets.insert(0, 1)
        buckets.insert(1, 6)
        assert buckets.purge_stale(lambda v, d: False) == (None, 2)
        assert len(buckets) == 0

    def test_invalid_delta(self):
        with pytest.raises(ValueError):
            BucketStore(0)


class TestDeltaStepping:
    @pytest.mark.parametrize("delta", [1, 2, 100])
    @pytest.mark.parametrize("num_ranks", [1, 2])
    def test_path_graph(self, path_edges, make_config, delta, num_ranks):
        cfg = make_config(num_ranks=num_ranks, delta=delta)
        distances, _ = delta_stepping(partition_1d(path_edges, num_ranks), 0, cfg)
        assert distances == [0, 1, 3, 4]

    def test_unit_path_one_bucket_per_level(self, path_edges, make_config):
        graphs = partition_1d(path_edges.with_unit_weights(), 2)
        distances, stats = delta_stepping(graphs, 0, make_config(num_ranks=2, delta=1))
        assert distances == [0, 1, 2, 3]
        assert stats.buckets_processed == 4

    def test_huge_delta_single_bucket(self, small_graph, make_config, small_source):
        cfg = make_config(num_ranks=4, delta=10**6)
        distances, stats = delta_stepping(partition_1d(small_graph, 4), small_source, cfg)
        assert distances == dijkstra_reference(small_graph, small_source)
        assert stats.buckets_processed == 1
        assert stats.epochs == 2

    @pytest.mark.parametrize("delta", [1, 16, 64])
    @pytest.mark.parametrize("num_ranks", [1, 3, 4])
    def test_matches_oracle_and_conserves(
        self, small_graph, small_source, make_config, delta, num_ranks
    ):
        cfg = make_config(num_ranks=num_ranks, delta=delta, coalescing_size=16)
        distances, stats = delta_stepping(partition_1d(small_graph, num_ranks), small_source, cfg)
        assert distances == dijkstra_reference(small_graph, small_source)
        assert stats.check_conservation(16) == []
        assert stats.epochs == 2 * stats.buckets_processed

    def test_source_without_edges(self, make_edges, make_config):
        graphs = partition_1d(make_edges(4, []), 2)
        distances, stats = delta_stepping(graphs, 3, make_config(num_ranks=2))
        assert distances[3] == 0
        assert stats.buckets_processed == 1
