"""
Tests for JSON files, datasets, metrics and SVG rendering.
"""

import json

import pandas as pd
import pytest

from tapkit.datasets.generators import GenConfig, config_echo, gen_ppsg, generate_dataset
from tapkit.exceptions import TapIOError, TapValueError
from tapkit.io.readers import (
    MANIFEST,
    instance_from_dict,
    instance_to_dict,
    read_dataset,
    read_instance,
    read_instances,
    read_metrics,
    read_solution,
    to_csv,
    write_dataset,
    write_instance,
    write_solution,
)
from tapkit.io.render import box_color, render_instance, render_solution, render_svg
from tapkit.solvers.baselines import solve_greedy


class TestInstanceFiles:
    """Test instance and solution JSON."""

    def test_round_trip(self, tmp_path, f1):
        """Test writing and reading an instance."""
        path = tmp_path / "f1.json"
        write_instance(f1, path)
        assert read_instance(path) == f1

    def test_canonical(self, tmp_path, f1):
        """Test that equal instances give byte-identical files."""
        write_instance(f1, tmp_path / "a.json")
        write_instance(f1, tmp_path / "b.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
        assert json.loads((tmp_path / "a.json").read_text())["format"] == "tapkit.instance"

    def test_witness_kept(self):
        """Test that a PPSG witness survives serialization."""
        inst, witness = gen_ppsg(GenConfig(seed=1, n=6, mode="ppsg"))
        restored = instance_from_dict(json.loads(json.dumps(instance_to_dict(inst))))
        assert restored.meta["witness"] == witness

    def test_solution_round_trip(self, tmp_path, f1):
        """Test writing and reading a solution."""
        solution = solve_greedy(f1)
        path = tmp_path / "sol.json"
        write_solution(solution, path)
        loaded = read_solution(path)
        assert loaded.steps == solution.steps
        assert loaded.reward == solution.reward
        assert loaded.method == "greedy"

    def test_wrong_format(self, tmp_path, f1):
        """Test error when reading a solution as an instance."""
        path = tmp_path / "sol.json"
        write_solution(solve_greedy(f1), path)
        with pytest.raises(TapValueError, match="tapkit.instance"):
            read_instance(path)

    def test_missing(self, tmp_path):
        """Test error on a missing file."""
        with pytest.raises(TapIOError):
            read_instance(tmp_path / "none.json")

    def test_malformed(self, tmp_path):
        """Test error on broken JSON."""
        path = tmp_path / "bad.json"
        path.write_text("{")
        with pytest.raises(TapIOError):
            read_instance(path)


class TestDatasets:
    """Test dataset directories."""

    def test_round_trip(self, tmp_path, small_rand_cfg):
        """Test writing and reading a dataset."""
        instances = generate_dataset(small_rand_cfg)
        manifest = write_dataset(instances, tmp_path, config_echo(small_rand_cfg))
        loaded, read_back = read_dataset(tmp_path)
        assert loaded == instances
        assert read_back == manifest
        assert manifest["count"] == 8
        assert manifest["seed"] == 3
        assert read_instances(tmp_path) == instances

    def test_checksum_stable(self, tmp_path, small_rand_cfg):
        """Test that regenerating a dataset reproduces its checksum."""
        first = write_dataset(generate_dataset(small_rand_cfg), tmp_path / "a")
        second = write_dataset(generate_dataset(small_rand_cfg), tmp_path / "b")
        assert first["checksum"] == second["checksum"]

    def test_tampered(self, tmp_path, small_rand_cfg):
        """Test that an edited file fails verification."""
        manifest = write_dataset(generate_dataset(small_rand_cfg), tmp_path)
        path = tmp_path / manifest["files"][0]
        path.write_text(path.read_text().replace('"index": 0', '"index": 99'))
        with pytest.raises(TapIOError, match="Checksum"):
            read_dataset(tmp_path)
        assert len(read_dataset(tmp_path, verify=False)[0]) == 8

    def test_empty(self, tmp_path):
        """Test a dataset without instances."""
        manifest = write_dataset([], tmp_path)
        assert manifest["count"] == 0
        assert (tmp_path / MANIFEST).exists()
        assert read_dataset(tmp_path)[0] == []

    def test_single_file(self, tmp_path, f1):
        """Test that a single instance file reads as a one-item dataset."""
        write_instance(f1, tmp_path / "f1.json")
        assert read_instances(tmp_path / "f1.json") == [f1]


class TestMetrics:
    """Test metric tables."""

    def test_round_trip(self, tmp_path):
        """Test writing and reading a CSV."""
        df = pd.DataFrame({"instance": [0, 1], "R": [0.25, 0.5]})
        to_csv(df, tmp_path / "m.csv")
        pd.testing.assert_frame_equal(read_metrics(tmp_path / "m.csv"), df)

    def test_missing(self, tmp_path):
        """Test error on a missing CSV."""
        with pytest.raises(TapIOError):
            read_metrics(tmp_path / "none.csv")


class TestRender:
    """Test SVG output."""

    def test_pile(self, tmp_path, f1):
        """Test that the pile figure tags every box."""
        path = render_instance(f1, tmp_path / "pile.svg")
        svg = path.read_text()
        assert svg.lstrip().startswith("<?xml")
        for box_id in f1.box_ids:
            assert f'id="box-{box_id}"' in svg

    def test_frames(self, tmp_path, f1):
        """Test one frame per step plus the pile."""
        frames = render_solution(f1, solve_greedy(f1), tmp_path)
        assert [p.name for p in frames] == [
            "frame_000.svg",
            "frame_001.svg",
            "frame_002.svg",
            "frame_003.svg",
        ]
        last = frames[-1].read_text()
        assert all(f'id="box-{b}"' in last for b in f1.box_ids)
        assert 'id="box-1"' not in frames[1].read_text()

    def test_byte_identical(self, tmp_path, f1):
        """Test that rendering twice gives identical files."""
        render_svg(f1, tmp_path / "a.svg")
        render_svg(f1, tmp_path / "b.svg")
        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()

    def test_3d(self, tmp_path):
        """Test rendering a 3D pile and packing."""
        inst = generate_dataset(GenConfig(seed=2, n=4, dims_mode=3))[0]
        frames = render_svg(inst, tmp_path / "frames", solve_greedy(inst))
        assert len(frames) == 5

    def test_multi_container(self, tmp_path):
        """Test one panel title per container."""
        inst = generate_dataset(GenConfig(seed=5, n=6, container_count=2))[0]
        frames = render_solution(inst, solve_greedy(inst), tmp_path)
        assert "container 1" in frames[-1].read_text()

    def test_colors(self):
        """Test that colours are stable per id."""
        assert box_color(3) == box_color(3)
        assert box_color(3) == box_color(23)
        assert box_color(3) != box_color(4)
