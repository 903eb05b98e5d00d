"""Tests for generation, partitioning and the edge-list file format."""

import math

import numpy as np
import pytest

from dgalab.graph import (
    EdgeListError,
    generate_kronecker,
    load_edge_list,
    max_path_length,
    owner,
    partition_1d,
    pick_sources,
    save_edge_list,
    scale_of,
)


class TestGenerateKronecker:
    def test_sample_count_before_self_loop_removal(self):
        edges = generate_kronecker(4, 16, 1, seed=1)
        assert edges.raw_samples == 256
        assert len(edges) <= 256
        assert edges.n == 16

    def test_tiny_graph(self):
        edges = generate_kronecker(1, 1, 1, seed=7)
        assert edges.n == 2
        assert set(edges.src.tolist()) <= {0, 1}
        assert set(edges.dst.tolist()) <= {0, 1}
        assert set(edges.weight.tolist()) <= {1}

    def test_deterministic(self):
        a = generate_kronecker(10, 16, 100, seed=42)
        b = generate_kronecker(10, 16, 100, seed=42)
        assert a == b
        assert a.src.tobytes() == b.src.tobytes()
        assert a.weight.tobytes() == b.weight.tobytes()

    def test_seed_changes_graph(self):
        assert generate_kronecker(8, 8, 100, seed=1) != generate_kronecker(8, 8, 100, seed=2)

    def test_no_self_loops_and_weights_in_range(self):
        edges = generate_kronecker(8, 16, 50, seed=9)
        assert not np.any(edges.src == edges.dst)
        assert edges.weight.min() >= 1
        assert edges.weight.max() <= 50
        assert edges.src.max() < edges.n

    def test_skewed_degree_distribution(self):
        edges = generate_kronecker(10, 16, 1, seed=4)
        degrees = np.bincount(edges.src, minlength=edges.n)
        assert degrees.max() > 10 * degrees.mean()

    @pytest.mark.parametrize(
        "scale,edgefactor,max_weight",
        [(0, 16, 1), (4, 0, 1), (4, 16, 0), (31, 16, 1)],
    )
    def test_rejects_bad_arguments(self, scale, edgefactor, max_weight):
        with pytest.raises(ValueError):
            generate_kronecker(scale, edgefactor, max_weight, seed=1)

    def test_rejects_weights_that_overflow_distances(self):
        with pytest.raises(ValueError, match="allows distances above"):
            generate_kronecker(20, 1, 5000, seed=1)

    def test_max_path_length(self):
        assert max_path_length(16, 10) == 150
        assert max_path_length(1, 10) == 0


class TestEdgeList:
    def test_unit_weights(self, path_edges):
        unit = path_edges.with_unit_weights()
        assert unit.weight.tolist() == [1, 1, 1]
        assert unit.src.tolist() == path_edges.src.tolist()

    def test_reachable_edge_count(self, path_edges):
        inf = math.inf
        assert path_edges.reachable_edge_count([0, 1, 3, 4]) == 3
        assert path_edges.reachable_edge_count([inf, 0, 2, 3]) == 2
        assert path_edges.reachable_edge_count([inf, inf, inf, 0]) == 0

    def test_max_weight(self, path_edges, make_edges):
        assert path_edges.max_weight == 2
        assert make_edges(4, []).max_weight == 0


class TestOwner:
    @pytest.mark.parametrize(
        "v,n,p,expected",
        [(3, 8, 2, 0), (4, 8, 2, 1), (7, 8, 8, 7), (0, 8, 1, 0), (5, 8, 3, 1)],
    )
    def test_block_owner(self, v, n, p, expected):
        assert owner(v, n, p) == expected


class TestPartition1D:
    def test_block_ranges(self, make_edges):
        graphs = partition_1d(make_edges(8, [(0, 5, 1), (6, 1, 1)]), 2)
        assert [(g.lo, g.hi) for g in graphs] == [(0, 4), (4, 8)]
        assert graphs[0].owns(3) and not graphs[0].owns(4)
        assert graphs[1].owner_of(2) == 0

    def test_hand_built_csr(self, make_edges):
        edges = make_edges(4, [(0, 1, 1), (1, 2, 2), (0, 2, 5), (2, 3, 1)])
        (graph,) = partition_1d(edges, 1)
        assert graph.row_offsets.tolist()[:4] == [0, 2, 3, 4]
        assert graph.row_offsets.tolist() == [0, 2, 3, 4, 4]
        assert graph.col.tolist() == [1, 2, 2, 3]
        assert graph.weights.tolist() == [1, 5, 2, 1]
        assert graph.neighbors(0) == [(1, 1), (2, 5)]
        assert graph.neighbors(3) == []

    @pytest.mark.parametrize("num_ranks", [1, 2, 3, 4, 8])
    def test_edges_conserved(self, small_graph, num_ranks):
        graphs = partition_1d(small_graph, num_ranks)
        assert sum(g.num_local_edges for g in graphs) == len(small_graph)
        assert sum(g.num_local_vertices for g in graphs) == small_graph.n
        local = sorted(e for g in graphs for e in g.local_edges())
        assert local == sorted(small_graph.triples())

    def test_edges_stored_at_source_owner(self, small_graph):
        for graph in partition_1d(small_graph, 4):
            for s, _, _ in graph.local_edges():
                assert graph.owns(s)

    def test_uneven_block_leaves_short_last_rank(self, make_edges):
        graphs = partition_1d(make_edges(8, [(7, 0, 1)]), 3)
        assert [(g.lo, g.hi) for g in graphs] == [(0, 3), (3, 6), (6, 8)]
        assert graphs[2].neighbors(7) == [(0, 1)]

    def test_too_many_ranks(self, path_edges):
        with pytest.raises(ValueError, match="exceeds vertex count"):
            partition_1d(path_edges, 5)


class TestPickSources:
    def test_distinct_and_with_out_edges(self, small_graph):
        sources = pick_sources(small_graph, 5, seed=1)
        assert len(sources) == len(set(sources)) == 5
        has_edges = set(small_graph.src.tolist())
        assert all(s in has_edges for s in sources)

    def test_prefix_stable(self, small_graph):
        assert pick_sources(small_graph, 3, seed=2) == pick_sources(small_graph, 6, seed=2)[:3]

    def test_edgeless_graph_falls_back_to_zero(self, make_edges):
        assert pick_sources(make_edges(4, []), 3, seed=1) == [0]

    def test_short_supply_is_logged(self, make_edges, caplog):
        edges = make_edges(8, [(0, 1, 1), (2, 3, 1)])
        with caplog.at_level("WARNING", logger="dgalab.graph"):
            sources = pick_sources(edges, 5, seed=1)
        assert sorted(sources) == [0, 2]
        assert "only 2 vertices have out-edges" in caplog.text

    def test_enough_sources_is_quiet(self, small_graph, caplog):
        with caplog.at_level("WARNING", logger="dgalab.graph"):
            pick_sources(small_graph, 2, seed=1)
        assert caplog.text == ""


class TestEdgeListFile:
    def test_two_edges(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("0 1 1\n1 0 1\n")
        edges = load_edge_list(path)
        assert len(edges) == 2
        assert edges.n == 2

    def test_rounds_n_to_power_of_two(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("0 2 5\n")
        assert load_edge_list(path).n == 4

    def test_comment_only_file(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("# comment\n")
        with pytest.raises(EdgeListError, match="no edges"):
            load_edge_list(path)

    def test_self_loops_only(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("1 1 3\n")
        with pytest.raises(EdgeListError, match="no edges"):
            load_edge_list(path)

    @pytest.mark.parametrize(
        "text,message",
        [
            ("0 1\n", "expected 'src dst weight'"),
            ("0 x 1\n", "non-integer"),
            ("0 1 -2\n", "negative weight"),
            ("0 1 0\n", "weight must be >= 1"),
            ("-1 1 2\n", "negative vertex id"),
        ],
    )
    def test_malformed_lines(self, tmp_path, text, message):
        path = tmp_path / "g.txt"
        path.write_text("0 1 1\n" + text)
        with pytest.raises(EdgeListError, match=message) as exc:
            load_edge_list(path)
        assert ":2:" in str(exc.value)

    def test_save_and_load_keeps_header_n(self, tmp_path, make_edges):
        edges = make_edges(16, [(0, 1, 4), (3, 2, 7)])
        loaded = load_edge_list(save_edge_list(edges, tmp_path / "g.txt"))
        assert loaded == edges
        assert scale_of(loaded) == 4

    def test_header_too_small(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("# n=2\n0 3 1\n")
        with pytest.raises(EdgeListError, match="header"):
            load_edge_list(path)

    def test_weights_whose_paths_overflow(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("0 1 3000000000\n1 2 3000000000\n")
        with pytest.raises(EdgeListError, match="allows distances above"):
            load_edge_list(path)

    def test_weight_above_wire_range(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("0 1 1\n0 1 99999999999999999999\n")
        with pytest.raises(EdgeListError, match="exceeds") as exc:
            load_edge_list(path)
        assert ":2:" in str(exc.value)


class TestEdgeListEncoding:
    def test_invalid_utf8_reports_line(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_bytes(b"0 1 1\n# caf\xe9\n1 0 1\n")
        with pytest.raises(EdgeListError, match="not valid UTF-8") as exc:
            load_edge_list(path)
        assert ":2:" in str(exc.value)

    def test_utf8_comment_is_ignored(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_bytes(b"0 1 1\n# caf\xc3\xa9\n1 0 1\n")
        edges = load_edge_list(path)
        assert len(edges) == 2

    def test_non_ascii_edge_line(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_bytes("0 1 1\n1 ٣ 1\n".encode())
        with pytest.raises(EdgeListError, match="non-ASCII") as exc:
            load_edge_list(path)
        assert ":2:" in str(exc.value)

    def test_missing_file(self, tmp_path):
        with pytest.raises(EdgeListError, match="Cannot read"):
            load_edge_list(tmp_path / "absent.txt")
