"""
Tests for the ``tap`` command-line interface.
"""

import json

import pytest

from tapkit.cli import (
    EXIT_CAPACITY,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VALIDATION,
    build_parser,
    exit_code,
    main,
)
from tapkit.exceptions import (
    TapCapacityError,
    TapGenerationError,
    TapIOError,
    TapValidationError,
    TapValueError,
)
from tapkit.io.readers import read_dataset, read_solution, write_instance
from tapkit.policy.checkpoint import save_checkpoint
from tapkit.policy.network import PackingPolicy, PolicyConfig


@pytest.fixture
def dataset_dir(tmp_path):
    out = tmp_path / "data"
    args = ["gen", "--n", "5", "--count", "3", "--seed", "2", "--out", str(out)]
    assert main(args) == EXIT_OK
    return out


class TestExitCodes:
    """Test the error to exit status mapping."""

    def test_mapping(self):
        """Test each error family."""
        assert exit_code(TapValidationError(["x"])) == EXIT_VALIDATION
        assert exit_code(TapCapacityError(12, 10)) == EXIT_CAPACITY
        assert exit_code(TapIOError("x")) == EXIT_IO
        assert exit_code(TapGenerationError("x")) == 6
        assert exit_code(TapValueError("x")) == EXIT_USAGE

    def test_parser_rejects_unknown_command(self):
        """Test that argparse exits with status 2."""
        with pytest.raises(SystemExit) as info:
            build_parser().parse_args(["pack"])
        assert info.value.code == 2


class TestGen:
    """Test ``tap gen``."""

    def test_dataset(self, dataset_dir, capsys):
        """Test the written dataset and manifest."""
        instances, manifest = read_dataset(dataset_dir)
        assert len(instances) == 3
        assert manifest["config"]["n"] == 5

    def test_count_zero(self, tmp_path, capsys):
        """Test that zero instances still write a manifest."""
        assert main(["gen", "--count", "0", "--out", str(tmp_path / "d")]) == EXIT_OK
        assert "0 instances" in capsys.readouterr().out

    def test_bad_value(self, tmp_path, capsys):
        """Test that invalid settings exit with the usage status."""
        code = main(["gen", "--n", "0", "--out", str(tmp_path / "d")])
        assert code == EXIT_USAGE
        assert "n must be" in capsys.readouterr().err

    def test_bad_threads(self, tmp_path):
        """Test that a thread count below 1 is refused."""
        assert main(["gen", "--threads", "0", "--out", str(tmp_path / "d")]) == EXIT_USAGE


class TestSolve:
    """Test ``tap solve``."""

    def test_greedy_f1(self, tmp_path, f1, capsys):
        """Test greedy on the F1 pile."""
        write_instance(f1, tmp_path / "f1.json")
        out = tmp_path / "sol.json"
        args = ["solve", "--instance", str(tmp_path / "f1.json"), "--out", str(out)]
        assert main(args) == EXIT_OK
        assert "order=[0, 2, 1]" in capsys.readouterr().out
        assert read_solution(out).order == (0, 2, 1)

    def test_render(self, tmp_path, f1):
        """Test writing frames next to the solution."""
        write_instance(f1, tmp_path / "f1.json")
        frames = tmp_path / "frames"
        args = ["solve", "--instance", str(tmp_path / "f1.json"), "--render", str(frames)]
        assert main(args) == EXIT_OK
        assert len(list(frames.glob("frame_*.svg"))) == 4

    def test_net(self, tmp_path, f1):
        """Test the network method with a checkpoint."""
        write_instance(f1, tmp_path / "f1.json")
        save_checkpoint(tmp_path / "m.pt", PackingPolicy(PolicyConfig(capacity=3, target_width=4)))
        args = [
            "solve",
            "--instance",
            str(tmp_path / "f1.json"),
            "--method",
            "net",
            "--model",
            str(tmp_path / "m.pt"),
        ]
        assert main(args) == EXIT_OK

    def test_missing_instance(self, tmp_path):
        """Test that a missing file exits with the IO status."""
        assert main(["solve", "--instance", str(tmp_path / "none.json")]) == EXIT_IO

    def test_invalid_instance(self, tmp_path, f1):
        """Test that an invalid pile exits with the validation status."""
        from dataclasses import replace

        write_instance(replace(f1, init_width=3), tmp_path / "bad.json")
        assert main(["solve", "--instance", str(tmp_path / "bad.json")]) == EXIT_VALIDATION


class TestEval:
    """Test ``tap eval``."""

    def test_deterministic_csv(self, tmp_path, dataset_dir, capsys):
        """Test that repeated runs write identical metric files."""
        outputs = []
        for name in ("a", "b"):
            out = tmp_path / f"{name}.csv"
            args = ["eval", "--dataset", str(dataset_dir), "--method", "random", "--out", str(out)]
            assert main(args) == EXIT_OK
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]
        assert outputs[0].splitlines()[0] == b"instance,n_boxes,C,P,S,R"

    def test_summary_with_timing(self, tmp_path, dataset_dir):
        """Test the summary file with timing."""
        summary = tmp_path / "summary.csv"
        args = ["eval", "--dataset", str(dataset_dir), "--timing", "--summary", str(summary)]
        assert main(args) == EXIT_OK
        header = summary.read_text().splitlines()[0]
        assert header == "method,placement,count,C,P,S,R,t_ms"

    def test_capacity(self, tmp_path, dataset_dir):
        """Test that oversized instances exit with the capacity status."""
        save_checkpoint(tmp_path / "m.pt", PackingPolicy(PolicyConfig(capacity=3, target_width=5)))
        args = ["eval", "--dataset", str(dataset_dir), "--method", "net"]
        args += ["--model", str(tmp_path / "m.pt")]
        assert main(args) == EXIT_CAPACITY
        assert main(args + ["--rolling"]) == EXIT_OK

    def test_net_needs_model(self, dataset_dir):
        """Test that the network method needs a checkpoint."""
        assert main(["eval", "--dataset", str(dataset_dir), "--method", "net"]) == EXIT_USAGE


class TestTrainAndRender:
    """Test ``tap train`` and ``tap render``."""

    @pytest.mark.slow
    def test_train(self, tmp_path, dataset_dir):
        """Test a short training run from a config file."""
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "batch_size": 2,
                    "epochs": 1,
                    "capacity": 5,
                    "static_dim": 8,
                    "dynamic_dim": 8,
                    "height_dim": 8,
                    "critic_dim": 8,
                }
            )
        )
        runs = tmp_path / "runs"
        args = ["train", "--config", str(cfg), "--train", str(dataset_dir), "--out", str(runs)]
        assert main(args) == EXIT_OK
        assert (runs / "best.pt").exists()
        assert (runs / "curve.csv").exists()

    def test_train_without_data(self):
        """Test that training needs a dataset."""
        assert main(["train"]) == EXIT_USAGE

    def test_render_pile(self, tmp_path, f1):
        """Test rendering a pile."""
        write_instance(f1, tmp_path / "f1.json")
        out = tmp_path / "pile.svg"
        assert main(["render", "--instance", str(tmp_path / "f1.json"), "--out", str(out)]) == 0
        assert out.exists()

    def test_render_bad_solution(self, tmp_path, f1):
        """Test that an invalid solution is refused before rendering."""
        from tapkit.core.geometry import PlacedBox
        from tapkit.core.instance import Solution
        from tapkit.io.readers import write_solution

        write_instance(f1, tmp_path / "f1.json")
        write_solution(Solution((PlacedBox(1, 0, (2, 1), 0, 0),)), tmp_path / "s.json")
        args = ["render", "--instance", str(tmp_path / "f1.json")]
        args += ["--solution", str(tmp_path / "s.json"), "--out", str(tmp_path / "frames")]
        assert main(args) == EXIT_VALIDATION
