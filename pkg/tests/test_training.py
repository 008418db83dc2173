"""
Tests for the training configuration, the REINFORCE trainer and evaluation.
"""

import json
from dataclasses import replace

import numpy as np
import pandas as pd
import pytest
import torch

from tapkit.datasets.generators import GenConfig, generate_dataset
from tapkit.exceptions import TapCapacityError, TapIOError, TapTrainingError, TapValueError
from tapkit.io.readers import read_metrics
from tapkit.policy.checkpoint import load_checkpoint
from tapkit.training.config import TrainConfig
from tapkit.training.evaluation import evaluate, solve_instance, summarize, torch_generator
from tapkit.training.trainer import (
    BEST_CHECKPOINT,
    CURVE_COLUMNS,
    CURVE_FILE,
    LAST_CHECKPOINT,
    Trainer,
    split_parameters,
    train,
)


@pytest.fixture
def tiny_cfg():
    return TrainConfig(
        batch_size=4,
        epochs=2,
        actor_lr=1e-3,
        critic_lr=1e-3,
        capacity=6,
        static_dim=8,
        dynamic_dim=8,
        height_dim=8,
        critic_dim=8,
        seed=11,
    )


@pytest.fixture
def tiny_data(small_rand_cfg):
    return generate_dataset(small_rand_cfg)


class TestTrainConfig:
    """Test training settings."""

    def test_defaults(self):
        """Test the default settings."""
        cfg = TrainConfig()
        assert (cfg.batch_size, cfg.clip, cfg.actor_lr, cfg.critic_lr) == (128, 2.0, 1e-4, 1e-4)
        assert cfg.baseline == "critic"

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"batch_size": 0},
            {"clip": 0.0},
            {"ema_beta": 1.0},
            {"placement": "corner"},
            {"baseline": "rollout"},
            {"entropy_coef": -0.1},
        ],
    )
    def test_invalid(self, kwargs):
        """Test rejection of bad settings."""
        with pytest.raises(TapValueError):
            TrainConfig(**kwargs)

    def test_from_json(self, tmp_path):
        """Test loading settings from JSON."""
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"epochs": 3, "placement": "mul"}))
        cfg = TrainConfig.from_json(path)
        assert (cfg.epochs, cfg.placement) == (3, "mul")

    def test_unknown_key(self, tmp_path):
        """Test that unknown keys are refused."""
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"epochs": 3, "momentum": 0.9}))
        with pytest.raises(TapValueError, match="momentum"):
            TrainConfig.from_json(path)

    def test_not_an_object(self, tmp_path):
        """Test error on a JSON list."""
        path = tmp_path / "cfg.json"
        path.write_text("[1, 2]")
        with pytest.raises(TapValueError):
            TrainConfig.from_json(path)

    def test_missing_file(self, tmp_path):
        """Test error on a missing file."""
        with pytest.raises(TapIOError):
            TrainConfig.from_json(tmp_path / "none.json")

    def test_policy_config(self, tiny_cfg, tiny_data):
        """Test the network shape derived from an instance."""
        pcfg = tiny_cfg.policy_config(tiny_data[0])
        assert (pcfg.capacity, pcfg.target_width, pcfg.static_dim) == (6, 5, 8)


class TestTrainerStep:
    """Test one gradient step."""

    def test_parameter_split(self, small_policy):
        """Test that actor and critic parameters partition the network."""
        groups = split_parameters(small_policy)
        total = sum(p.numel() for p in small_policy.parameters())
        assert sum(p.numel() for g in groups.values() for p in g) == total
        assert len(groups["critic"]) == 4

    def test_critic_loss_only_moves_critic(self, tiny_cfg, small_policy, tiny_data):
        """Test that gradients stay within their own parameter group."""
        trainer = Trainer(tiny_cfg, small_policy)
        torch.manual_seed(0)
        trainer.actor_opt.step = lambda: None
        before = {n: p.detach().clone() for n, p in small_policy.named_parameters()}
        trainer.step(tiny_data[:4])
        for name, param in small_policy.named_parameters():
            if not name.startswith("critic."):
                assert torch.equal(before[name], param), name
        assert any(
            not torch.equal(before[n], p)
            for n, p in small_policy.named_parameters()
            if n.startswith("critic.")
        )

    def test_actor_grads_exclude_critic_loss(self, tiny_cfg, small_policy, tiny_data):
        """Test that the critic head gets no gradient from the actor loss."""
        cfg = replace(tiny_cfg, baseline="ema")
        trainer = Trainer(cfg, small_policy)
        trainer.actor_opt.step = lambda: None
        trainer.step(tiny_data[:4])
        assert all(p.grad is None for p in trainer.critic_params)
        assert any(p.grad is not None for p in trainer.actor_params)

    def test_ema_baseline(self, tiny_cfg, small_policy):
        """Test the moving-average baseline update."""
        trainer = Trainer(replace(tiny_cfg, baseline="ema", ema_beta=0.5), small_policy)
        values = torch.zeros(2)
        assert trainer.baseline(values, torch.tensor([0.4, 0.6])).tolist() == [0.5, 0.5]
        assert trainer.baseline(values, torch.tensor([1.0, 1.0])).tolist() == [0.75, 0.75]

    def test_step_stats(self, tiny_cfg, small_policy, tiny_data):
        """Test the statistics of one step."""
        stats = Trainer(tiny_cfg, small_policy).step(tiny_data[:4])
        assert set(stats) == {"C", "P", "S", "R", "actor_loss", "critic_loss"}
        assert 0.0 <= stats["R"] <= 1.0
        assert np.isfinite(stats["critic_loss"])

    def test_non_finite_loss(self, tmp_path, tiny_cfg, small_policy, tiny_data):
        """Test that a non-finite loss dumps the batch and stops training."""
        with torch.no_grad():
            for param in small_policy.critic.parameters():
                param.fill_(float("nan"))
        trainer = Trainer(tiny_cfg, small_policy, tmp_path)
        with pytest.raises(TapTrainingError) as info:
            trainer.step(tiny_data[:2])
        assert info.value.dump_path is not None
        dumped = json.loads(open(info.value.dump_path, encoding="utf-8").read())
        assert len(dumped["instances"]) == 2

    @pytest.mark.parametrize("entropy_coef", [0.0, 0.01])
    def test_parameters_stay_finite(self, tiny_cfg, small_policy, tiny_data, entropy_coef):
        """Test that masked states leave every parameter and gradient finite after a step."""
        trainer = Trainer(replace(tiny_cfg, entropy_coef=entropy_coef), small_policy)
        trainer.step(tiny_data[:4])
        for name, param in small_policy.named_parameters():
            assert torch.isfinite(param).all(), name
            if param.grad is not None:
                assert torch.isfinite(param.grad).all(), name

    def test_non_finite_gradient(self, tmp_path, tiny_cfg, small_policy, tiny_data):
        """Test that a non-finite gradient dumps the batch before any update."""
        small_policy.start_token.register_hook(lambda grad: grad * float("nan"))
        before = small_policy.start_token.detach().clone()
        trainer = Trainer(tiny_cfg, small_policy, tmp_path)
        with pytest.raises(TapTrainingError, match="gradient") as info:
            trainer.step(tiny_data[:2])
        assert torch.equal(small_policy.start_token.detach(), before)
        dumped = json.loads(open(info.value.dump_path, encoding="utf-8").read())
        assert not np.isfinite(dumped["info"]["actor_grad_norm"])


@pytest.mark.slow
class TestTrain:
    """Test complete training runs."""

    def test_outputs(self, tmp_path, tiny_cfg, tiny_data):
        """Test checkpoints and the training curve."""
        result = train(tiny_cfg, tiny_data, out_dir=tmp_path)
        assert (tmp_path / BEST_CHECKPOINT).exists()
        assert (tmp_path / LAST_CHECKPOINT).exists()
        curve = read_metrics(tmp_path / CURVE_FILE)
        assert list(curve.columns) == CURVE_COLUMNS
        assert curve["epoch"].tolist() == [1, 2]
        assert result.best_epoch in (1, 2)
        assert result.best_reward == pytest.approx(curve["eval_R"].max())
        loaded, meta = load_checkpoint(result.best_checkpoint)
        assert meta["epoch"] == result.best_epoch

    def test_deterministic(self, tmp_path, tiny_cfg, tiny_data):
        """Test that a seed fixes the whole run."""
        first = train(tiny_cfg, tiny_data, out_dir=tmp_path / "a")
        second = train(tiny_cfg, tiny_data, out_dir=tmp_path / "b")
        pd.testing.assert_frame_equal(first.curve, second.curve)

    def test_eval_every(self, tmp_path, tiny_cfg, tiny_data):
        """Test that held-out evaluation skips epochs but always runs last."""
        cfg = replace(tiny_cfg, epochs=3, eval_every=2)
        result = train(cfg, tiny_data, out_dir=tmp_path)
        assert result.curve["eval_R"].isna().tolist() == [True, False, False]

    def test_no_out_dir(self, tmp_path, monkeypatch, tiny_cfg, tiny_data):
        """Test that a run without an output directory writes nothing."""
        monkeypatch.chdir(tmp_path)
        result = train(replace(tiny_cfg, epochs=1), tiny_data)
        assert result.out_dir is None
        assert result.best_checkpoint is None
        assert len(result.curve) == 1
        assert list(tmp_path.iterdir()) == []

    def test_capacity(self, tmp_path, tiny_cfg):
        """Test error when training instances exceed the capacity."""
        data = generate_dataset(GenConfig(seed=1, n=8, count=2))
        with pytest.raises(TapCapacityError):
            train(tiny_cfg, data, out_dir=tmp_path)


class TestEvaluate:
    """Test the evaluation harness."""

    def test_columns(self, tiny_data):
        """Test one row per instance with the metric columns."""
        df = evaluate(tiny_data, method="greedy")
        assert list(df.columns) == ["instance", "n_boxes", "C", "P", "S", "R", "t_ms"]
        assert df["instance"].tolist() == list(range(len(tiny_data)))
        assert df["R"].between(0, 1).all()

    def test_random_deterministic(self, tiny_data):
        """Test that a seed fixes random baselines."""
        first = evaluate(tiny_data, method="random", seed=3).drop(columns=["t_ms"])
        second = evaluate(tiny_data, method="random", seed=3).drop(columns=["t_ms"])
        pd.testing.assert_frame_equal(first, second)

    def test_net_capacity(self, tiny_data):
        """Test that oversized instances need rolling mode."""
        from tapkit.policy.network import PackingPolicy, PolicyConfig

        policy = PackingPolicy(PolicyConfig(capacity=4, target_width=5))
        with pytest.raises(TapCapacityError):
            evaluate(tiny_data, method="net", model=policy)

    def test_net_rolling(self, tiny_data):
        """Test rolling evaluation of oversized instances."""
        from tapkit.policy.network import PackingPolicy, PolicyConfig

        policy = PackingPolicy(PolicyConfig(capacity=4, target_width=5, static_dim=8))
        df = evaluate(tiny_data[:2], method="net", model=policy, rolling=True)
        assert len(df) == 2

    def test_net_from_checkpoint(self, tmp_path, small_policy, tiny_data):
        """Test evaluation from a checkpoint path."""
        from tapkit.policy.checkpoint import save_checkpoint

        path = tmp_path / "m.pt"
        save_checkpoint(path, small_policy)
        by_path = evaluate(tiny_data, method="net", model=path)
        by_object = evaluate(tiny_data, method="net", model=small_policy)
        assert by_path["R"].tolist() == by_object["R"].tolist()

    def test_unknown_method(self, tiny_data):
        """Test error on an unknown method."""
        with pytest.raises(TapValueError):
            evaluate(tiny_data, method="oracle")

    def test_solve_instance_needs_model(self, tiny_data):
        """Test that the net method needs a policy."""
        with pytest.raises(TapValueError):
            solve_instance(tiny_data[0], method="net")

    def test_summary(self):
        """Test the one-row summary."""
        df = pd.DataFrame(
            {
                "instance": [0, 1],
                "n_boxes": [3, 3],
                "C": [0.5, 1.0],
                "P": [1.0, 1.0],
                "S": [1.0, 0.5],
                "R": [0.8, 0.9],
                "t_ms": [1.0, 3.0],
            }
        )
        summary = summarize(df, "greedy", "lb")
        assert summary.iloc[0].to_dict() == {
            "method": "greedy",
            "placement": "lb",
            "count": 2,
            "C": 0.75,
            "P": 1.0,
            "S": 0.75,
            "R": pytest.approx(0.85),
            "t_ms": 2.0,
        }
        assert "t_ms" not in summarize(df.drop(columns=["t_ms"]), timing=False).columns

    def test_torch_generator(self):
        """Test that sampling streams depend on seed and index only."""
        a = torch.rand(3, generator=torch_generator(1, 2))
        b = torch.rand(3, generator=torch_generator(1, 2))
        c = torch.rand(3, generator=torch_generator(1, 3))
        assert torch.equal(a, b)
        assert not torch.equal(a, c)
