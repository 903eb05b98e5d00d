"""Tests for the dgalab command line."""

import csv
import io

import pytest

from dgalab import cli
from dgalab.algorithms.dc import dc_sssp
from dgalab.graph import load_edge_list
from dgalab.metrics import CSV_COLUMNS

SMALL = ["--graph.scale=5", "--graph.edgefactor=4", "--rt.num_ranks=2"]


@pytest.fixture(autouse=True)
def no_seed_env(monkeypatch):
    monkeypatch.delenv("DGALAB_SEED", raising=False)


def read_rows(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


class TestRun:
    def test_csv_to_stdout(self, capsys):
        assert cli.main(["run", *SMALL, "--exp.sources=2"]) == cli.EXIT_OK
        out = capsys.readouterr().out
        assert out.splitlines()[0] == ",".join(CSV_COLUMNS)
        rows = read_rows(out)
        assert len(rows) == 2
        assert rows[0]["num_ranks"] == "2"

    def test_csv_to_file(self, tmp_path, capsys):
        out = tmp_path / "rows.csv"
        assert cli.main(["run", *SMALL, "--out", str(out)]) == cli.EXIT_OK
        assert capsys.readouterr().out == ""
        assert len(read_rows(out.read_text())) == 1

    def test_config_file_and_flag_precedence(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("rt.ee=3\nrt.coalescing_size=8\n")
        assert cli.main(["run", "--config", str(cfg), *SMALL, "--rt.coalescing_size=16"]) == 0
        (row,) = read_rows(capsys.readouterr().out)
        assert (row["ee"], row["coalescing_size"]) == ("3", "16")

    def test_seed_from_environment(self, monkeypatch, capsys):
        monkeypatch.setenv("DGALAB_SEED", "11")
        cli.main(["run", *SMALL, "--rt.seed=2"])
        (row,) = read_rows(capsys.readouterr().out)
        assert row["seed"] == "11"

    def test_deterministic_output(self, capsys):
        cli.main(["run", *SMALL, "--exp.algorithm=delta-stepping"])
        first = capsys.readouterr().out
        cli.main(["run", *SMALL, "--exp.algorithm=delta-stepping"])
        assert capsys.readouterr().out == first

    def test_validation_failure_exit_code(self, monkeypatch, capsys):
        def broken(graphs, source, cfg):
            distances, stats = dc_sssp(graphs, source, cfg)
            distances[source] = 5
            return distances, stats

        monkeypatch.setitem(cli.experiment.ALGORITHMS, "dc-sssp", broken)
        assert cli.main(["run", *SMALL]) == cli.EXIT_VALIDATION_FAILED
        assert len(read_rows(capsys.readouterr().out)) == 1


class TestConfigErrors:
    def test_unknown_key(self, capsys):
        assert cli.main(["run", "--rt.bogus=1"]) == cli.EXIT_CONFIG_ERROR
        assert "Valid keys" in capsys.readouterr().err

    def test_invalid_value(self):
        assert cli.main(["run", "--rt.ee=0"]) == cli.EXIT_CONFIG_ERROR

    def test_bad_edge_list(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("# nothing\n")
        assert cli.main(["run", f"--graph.path={path}"]) == cli.EXIT_CONFIG_ERROR

    def test_missing_subcommand(self):
        with pytest.raises(SystemExit):
            cli.main([])

    def test_weights_overflowing_distances(self, capsys):
        args = ["run", "--graph.scale=20", "--graph.max_weight=5000"]
        assert cli.main(args) == cli.EXIT_CONFIG_ERROR
        assert "allows distances above" in capsys.readouterr().err

    def test_undecodable_edge_list(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_bytes(b"0 1 1\n# caf\xe9\n1 0 1\n")
        assert cli.main(["run", f"--graph.path={path}"]) == cli.EXIT_CONFIG_ERROR

    def test_invalid_sweep_combination(self, capsys):
        args = [
            "sweep",
            "--rt.num_ranks=1",
            "--sweep.graph.scale=1,5",
            "--sweep.rt.num_ranks=1,4",
        ]
        assert cli.main(args) == cli.EXIT_CONFIG_ERROR
        assert "exceeds vertex count" in capsys.readouterr().err


class TestSweep:
    def test_cliff_sweep_rows(self, capsys):
        args = [
            "sweep",
            *SMALL,
            "--sweep.rt.coalescing_size=100,101",
            "--net.eager_threshold_bytes=1200",
        ]
        assert cli.main(args) == cli.EXIT_OK
        rows = read_rows(capsys.readouterr().out)
        assert [r["coalescing_size"] for r in rows] == ["100", "101"]


class TestGenerateAndValidate:
    def test_generate_writes_edge_list(self, tmp_path):
        out = tmp_path / "g.txt"
        assert cli.main(["generate", "--graph.scale=4", "--out", str(out)]) == cli.EXIT_OK
        edges = load_edge_list(out)
        assert edges.n == 16
        assert edges.raw_samples > 0

    def test_generate_needs_out(self):
        assert cli.main(["generate", "--graph.scale=4"]) == cli.EXIT_CONFIG_ERROR

    def test_validate_summary(self, capsys):
        assert cli.main(["validate", *SMALL, "--exp.sources=2"]) == cli.EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 7
        assert all(line.startswith("PASS ") for line in lines[:6])
        assert lines[-1] == "PASSED: 6/6 checks"
