import numpy as np
import pytest

from bayestrl.cli import main
from bayestrl.experiment import (CSV_HEADER, METHODS, CurveRecord, ExperimentConfig,
                                 aggregate_curves, emit_csv, maze_seed, run_maze, run_method)
from bayestrl.maze import LEFT, RIGHT, DOWN, UP, generate_maze, parse_maze, serialize_maze
from bayestrl.prior import load_undo_matrix, save_undo_matrix

SMALL = dict(num_mazes=4, width=6, height=6, episodes_per_maze=6)


class TestConfig:
    @pytest.mark.parametrize("kwargs", [dict(method="2-prior"), dict(num_mazes=0),
                                        dict(episodes_per_maze=0), dict(width=1), dict(beta=0.0)])
    def test_rejected(self, kwargs):
        with pytest.raises(ValueError):
            ExperimentConfig(**kwargs)


class TestRunMethod:
    def test_shape_and_determinism(self):
        cfg = ExperimentConfig(method="no-prior", **SMALL)
        a, _ = run_method(cfg)
        b, _ = run_method(cfg, jobs=2)
        assert a.shape == (4, 6)
        np.testing.assert_array_equal(a, b)

    def test_same_corpus_for_all_methods(self):
        seeds = [maze_seed(3, i) for i in range(5)]
        assert seeds == [maze_seed(3, i) for i in range(5)]
        assert len(set(seeds)) == 5

    def test_one_prior_memory_is_first_order_only(self):
        _, mem = run_maze(ExperimentConfig(method="1-prior", **SMALL), 0)
        assert mem.blocked and mem.undo_allowed.all()

    def test_no_prior_has_no_memory(self):
        _, mem = run_maze(ExperimentConfig(method="no-prior", **SMALL), 0)
        assert mem is None

    def test_undoing_pairs_transfer(self):
        cfg = ExperimentConfig(method="1-2-prior", **SMALL)
        _, mem0 = run_maze(cfg, 0)
        zero = {(LEFT, RIGHT), (RIGHT, LEFT), (UP, DOWN), (DOWN, UP)}
        learned = {(int(i), int(j)) for i, j in zip(*np.nonzero(mem0.undo_allowed == 0))}
        assert learned == zero
        _, mem_final = run_method(cfg)
        assert not mem_final.blocked
        np.testing.assert_array_equal(mem_final.undo_allowed, mem0.undo_allowed)


class TestAggregate:
    def test_single_maze(self):
        recs = aggregate_curves([[5, 3, 2]], "no-prior")
        assert [r.mean_length for r in recs] == [5, 3, 2]
        assert all(r.stderr_length == 0 and r.num_mazes == 1 for r in recs)

    def test_mean(self):
        recs = aggregate_curves([[10, 4], [20, 6]], "1-prior")
        assert recs[0].mean_length == 15
        assert recs[0].stderr_length == pytest.approx(np.std([10, 20], ddof=1) / np.sqrt(2))

    def test_ragged_rejected(self):
        with pytest.raises(ValueError):
            aggregate_curves([[1, 2], [3]], "no-prior")


class TestCsv:
    def test_empty(self, tmp_path):
        path = tmp_path / "c.csv"
        emit_csv([], path)
        assert path.read_text() == ",".join(CSV_HEADER) + "\n"

    def test_one_record(self, tmp_path):
        path = tmp_path / "c.csv"
        emit_csv([CurveRecord("1-prior", 0, 12.5, 0.25, 3)], path)
        assert path.read_text().splitlines() == [",".join(CSV_HEADER), "1-prior,0,12.5,0.25,3"]

    def test_ordering(self, tmp_path):
        path = tmp_path / "c.csv"
        recs = [CurveRecord(m, i, 1.0, 0.0, 1) for m in reversed(METHODS) for i in (1, 0)]
        emit_csv(recs, path)
        rows = [line.split(",")[:2] for line in path.read_text().splitlines()[1:]]
        assert rows == [[m, str(i)] for m in METHODS for i in (0, 1)]

    def test_unwritable(self, tmp_path):
        with pytest.raises(OSError):
            emit_csv([], tmp_path / "missing" / "c.csv")


class TestCli:
    ARGS = ["--mazes", "3", "--size", "6x6", "--episodes", "4", "--seed", "5"]

    def test_run_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["run", *self.ARGS, "--out", str(a)]) == 0
        assert main(["run", *self.ARGS, "--jobs", "2", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        lines = a.read_text().splitlines()
        assert lines[0] == ",".join(CSV_HEADER) and len(lines) == 1 + 3 * 4

    def test_single_method(self, tmp_path):
        out = tmp_path / "c.csv"
        assert main(["run", *self.ARGS, "--method", "1-prior", "--out", str(out)]) == 0
        assert {line.split(",")[0] for line in out.read_text().splitlines()[1:]} == {"1-prior"}

    def test_undo_matrix_round_trip(self, tmp_path):
        g_out = tmp_path / "g.txt"
        assert main(["run", *self.ARGS, "--method", "1-2-prior", "--out", str(tmp_path / "c.csv"),
                     "--undo-out", str(g_out)]) == 0
        g = load_undo_matrix(g_out)
        assert g.shape == (4, 4) and g.sum() == 12
        assert main(["run", *self.ARGS, "--method", "1-2-prior", "--out", str(tmp_path / "d.csv"),
                     "--undo-in", str(g_out)]) == 0

    def test_bad_config_exit_code(self, tmp_path, capsys):
        assert main(["run", "--mazes", "0", "--out", str(tmp_path / "c.csv")]) == 1
        assert "error" in capsys.readouterr().err
        bad = tmp_path / "g.txt"
        bad.write_text("1 2\n0 1\n")
        assert main(["run", *self.ARGS, "--undo-in", str(bad), "--out", str(tmp_path / "c.csv")]) == 1
        with pytest.raises(SystemExit) as exc:
            main(["run", "--size", "ten", "--out", "x"])
        assert exc.value.code != 0

    def test_maze_generate_and_inspect(self, tmp_path, capsys):
        path = tmp_path / "m.txt"
        assert main(["maze", "generate", "--size", "10x10", "--seed", "4", "--out", str(path)]) == 0
        assert parse_maze(path.read_text()) == generate_maze(10, 10, 4)
        assert main(["maze", "inspect", str(path)]) == 0
        out = capsys.readouterr().out
        assert "shortest path" in out and "10x10" in out

    def test_maze_inspect_rejects_bad_file(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text("S.\nS G\n")
        assert main(["maze", "inspect", str(path)]) == 1

    def test_maze_generate_stdout(self, capsys):
        assert main(["maze", "generate", "--size", "4x4", "--seed", "0"]) == 0
        assert capsys.readouterr().out == serialize_maze(generate_maze(4, 4, 0)) + "\n"
