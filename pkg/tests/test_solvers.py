"""
Tests for the baseline solvers and the packing state they drive.
"""

import numpy as np
import pytest

from tapkit.core.geometry import PlacedBox
from tapkit.core.instance import Solution
from tapkit.datasets.generators import GenConfig, gen_rand, generate_dataset
from tapkit.exceptions import TapFeasibilityError, TapValueError
from tapkit.packing.state import initial_state, pack_sequence, replay_solution
from tapkit.solvers.baselines import greedy_step, solve_exhaustive, solve_greedy, solve_random

from .conftest import A, B, C


class TestPackingState:
    """Test episodes over the F1 pile."""

    def test_initial(self, f1):
        """Test the start of an episode."""
        state = initial_state(f1)
        assert not state.is_done
        assert len(state.containers) == 1
        assert state.remaining_max_dim() == 2

    def test_apply_blocked(self, f1):
        """Test error when transporting a blocked box."""
        state = initial_state(f1)
        with pytest.raises(TapFeasibilityError):
            state.apply(f1.box(B).oriented(0))

    def test_apply_rotation_without_side(self, f1):
        """Test error when rotating a box boxed in on both sides."""
        with pytest.raises(TapFeasibilityError):
            initial_state(f1).apply(f1.box(A).oriented(1))

    def test_full_sequence(self, f1):
        """Test packing every box."""
        order = [f1.box(C).oriented(0), f1.box(B).oriented(0), f1.box(A).oriented(1)]
        state = pack_sequence(f1, order)
        assert state.is_done
        assert [s.box_id for s in state.steps] == [C, B, A]
        solution = state.to_solution("manual")
        assert replay_solution(f1, solution) == []


class TestReplay:
    """Test solution replay."""

    def test_blocked_step(self, f1):
        """Test that moving a covered box is reported."""
        steps = (PlacedBox(B, 0, (2, 1), 0, 0),)
        violations = replay_solution(f1, Solution(steps))
        assert violations[0] == "step 0 (box 1): blocked from the top"

    def test_floating_step(self, f1):
        """Test that a box off the skyline is reported."""
        steps = (PlacedBox(A, 0, (2, 2), 0, 1),)
        assert "does not rest on the skyline" in replay_solution(f1, Solution(steps))[0]

    def test_incomplete(self, f1):
        """Test that untransported boxes are reported."""
        steps = (PlacedBox(C, 0, (2, 2), 0, 0),)
        assert replay_solution(f1, Solution(steps)) == [
            "box 0: never transported",
            "box 1: never transported",
        ]

    def test_out_of_bounds(self, f1):
        """Test that a box outside the target container is reported."""
        steps = (PlacedBox(C, 0, (2, 2), 3, 0),)
        assert replay_solution(f1, Solution(steps))[0].endswith("out of bounds")

    def test_rotation_without_side(self, f1):
        """Test that a rotation needs a free side."""
        steps = (PlacedBox(C, 1, (2, 2), 0, 0),)
        assert "rotation without side access" in replay_solution(f1, Solution(steps))[0]

    def test_dims_mismatch(self, f1):
        """Test that extents must follow the orientation."""
        steps = (PlacedBox(C, 0, (2, 3), 0, 0),)
        assert replay_solution(f1, Solution(steps))[0].endswith("dims mismatch")


class TestGreedy:
    """Test the greedy solver."""

    def test_order(self, f1):
        """Test the greedy order on the F1 pile."""
        solution = solve_greedy(f1)
        assert solution.order == (A, C, B)
        assert solution.method == "greedy"
        assert replay_solution(f1, solution) == []

    def test_step_commits_best(self, f1):
        """Test that one greedy step packs A first."""
        state = greedy_step(initial_state(f1))
        assert state.steps[0].box_id == A

    @pytest.mark.parametrize("strategy", ["lb", "mul", "macs"])
    def test_valid_on_random_piles(self, strategy, small_rand_cfg):
        """Test that greedy solutions replay cleanly under every strategy."""
        inst = gen_rand(small_rand_cfg, index=1)
        solution = solve_greedy(inst, strategy)
        assert replay_solution(inst, solution) == []
        assert 0.0 < solution.reward.R <= 1.0


class TestRandom:
    """Test the random solver."""

    def test_seeded(self, small_rand_cfg):
        """Test that a seeded generator fixes the sequence."""
        inst = gen_rand(small_rand_cfg)
        first = solve_random(inst, rng=np.random.default_rng(5))
        second = solve_random(inst, rng=np.random.default_rng(5))
        assert first.steps == second.steps

    def test_valid(self, small_rand_cfg):
        """Test that random solutions replay cleanly."""
        inst = gen_rand(small_rand_cfg, index=4)
        for seed in range(5):
            solution = solve_random(inst, "mul", np.random.default_rng(seed))
            assert replay_solution(inst, solution) == []


class TestExhaustive:
    """Test exhaustive search."""

    def test_not_worse_than_greedy(self, f1):
        """Test that exhaustive search matches or beats greedy."""
        assert solve_exhaustive(f1).reward.R >= solve_greedy(f1).reward.R - 1e-12

    def test_small_random(self):
        """Test exhaustive search on a small random pile."""
        inst = gen_rand(GenConfig(seed=8, n=4))
        best = solve_exhaustive(inst)
        assert replay_solution(inst, best) == []
        assert best.reward.R >= solve_greedy(inst).reward.R - 1e-12
        assert best.meta["leaves"] >= 1

    def test_limit(self, small_rand_cfg):
        """Test that large instances are refused."""
        with pytest.raises(TapValueError, match="limited"):
            solve_exhaustive(gen_rand(small_rand_cfg))

    def test_greedy_within_reach(self):
        """Test that greedy never beats the exhaustive optimum on 4-box piles."""
        for seed in range(12):
            inst = gen_rand(GenConfig(seed=seed, n=4))
            assert solve_greedy(inst).reward.R <= solve_exhaustive(inst).reward.R + 1e-12


@pytest.mark.slow
class TestBaselineRewards:
    """Test mean baseline rewards on a RAND set of 10-box piles."""

    @pytest.fixture(scope="class")
    def means(self):
        instances = generate_dataset(GenConfig(seed=2024, n=10, count=300))
        rng = np.random.default_rng(2024)
        greedy = np.mean([solve_greedy(inst, "lb").reward.R for inst in instances])
        random = np.mean([solve_random(inst, "lb", rng).reward.R for inst in instances])
        return greedy, random

    def test_greedy_level(self, means):
        """Test Greedy+LB near 0.922."""
        assert means[0] == pytest.approx(0.922, abs=0.03)

    def test_random_level(self, means):
        """Test Random+LB in the band around 0.860."""
        assert 0.80 <= means[1] <= 0.89

    def test_gap(self, means):
        """Test that greedy beats random by at least 0.04."""
        assert means[0] - means[1] >= 0.04
