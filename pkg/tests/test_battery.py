"""Tests for the block-frequency battery."""

import math

import pytest

from typicality_lab.battery import BatteryReport, block_frequency_test, run_battery
from typicality_lab.chsh import chsh_distribution, coin_event
from typicality_lab.spaces import FiniteProbabilitySpace, fair_coin
from typicality_lab.worlds import WorldPrefix, condition_seq, sample_world


class TestBlockFrequency:
    def test_degenerate_space_scores_zero(self):
        fps = FiniteProbabilitySpace(["a", "b"], [1.0, 0.0])
        world = sample_world(fps, 1000, seed=5)
        result = block_frequency_test(world, fps, 1)
        assert result.statistic == 0.0
        assert result.passed

    def test_fair_coin_passes(self):
        world = sample_world(fair_coin(), 10_000, seed=101)
        result = block_frequency_test(world, fair_coin(), 1)
        assert result.passed
        assert result.dof == 1

    def test_alternating_world_fails_at_k2(self):
        # "0101..." has every length-2 block equal to (0,1).  With 5000
        # blocks and 1250 expected per cell the statistic is, by hand,
        # 3 * (0-1250)^2/1250 + (5000-1250)^2/1250 = 3750 + 11250 = 15000.
        world = WorldPrefix.from_symbols((0, 1), [0, 1] * 5000)
        result = block_frequency_test(world, fair_coin(), 2)
        assert result.statistic == pytest.approx(15000.0, abs=1e-9)
        assert not result.passed

    def test_alternating_world_passes_at_k1(self):
        # The same sequence has perfect single-symbol frequencies.
        world = WorldPrefix.from_symbols((0, 1), [0, 1] * 5000)
        result = block_frequency_test(world, fair_coin(), 1)
        assert result.statistic == 0.0

    def test_zero_probability_cells_are_removed(self):
        fps = FiniteProbabilitySpace(["a", "b", "z"], [0.5, 0.5, 0.0])
        world = sample_world(fps, 2000, seed=6)
        result = block_frequency_test(world, fps, 1)
        assert result.zero_cells == 1
        assert result.dof == 1
        assert result.zero_cell_hits == 0

    def test_zero_probability_hit_is_infinite(self):
        fps = FiniteProbabilitySpace(["a", "z"], [1.0, 0.0])
        world = WorldPrefix.from_symbols(["a", "z"], ["a"] * 999 + ["z"])
        result = block_frequency_test(world, fps, 1)
        assert result.statistic == float("inf")
        assert result.zero_cell_hits == 1
        assert not result.passed

    def test_insufficient_length_rejected(self):
        world = sample_world(fair_coin(), 100, seed=1)
        with pytest.raises(ValueError, match="too short"):
            block_frequency_test(world, fair_coin(), 4)

    def test_block_len_must_be_positive(self):
        world = sample_world(fair_coin(), 100, seed=1)
        with pytest.raises(ValueError, match="block_len"):
            block_frequency_test(world, fair_coin(), 0)

    def test_alphabet_mismatch_rejected(self):
        world = sample_world(fair_coin(), 100, seed=1)
        with pytest.raises(ValueError, match="alphabets differ"):
            block_frequency_test(world, FiniteProbabilitySpace("ab", [0.5, 0.5]), 1)

    def test_six_sigma_deviation_fails(self):
        # A single-symbol excess of z sigma contributes z^2 (1 - p) per
        # cell; at 6 sigma on a fair coin the statistic is 36 >> threshold.
        n, z = 10_000, 6.5
        excess = int(z * math.sqrt(n * 0.25))
        world = WorldPrefix.from_symbols(
            (0, 1), [0] * (n // 2 + excess) + [1] * (n // 2 - excess)
        )
        report = run_battery(world, fair_coin(), (1, 2))
        k1 = report.tests[0]
        assert k1.block_len == 1
        assert k1.statistic > k1.threshold
        assert not report.all_pass


class TestRunBattery:
    def test_degenerate_all_pass(self):
        fps = FiniteProbabilitySpace(["a", "b"], [1.0, 0.0])
        world = sample_world(fps, 2000, seed=2)
        report = run_battery(world, fps)
        assert report.all_pass
        assert report.passed_count == 3

    def test_sampled_chsh_world_passes(self):
        fps = chsh_distribution("analytic")
        world = sample_world(fps, 200_000, seed=42)
        report = run_battery(world, fps, (1, 2))
        assert report.all_pass

    def test_conditioned_chsh_world_passes_conditional_battery(self):
        # Restricting to one coin pair leaves a sequence typical for the
        # conditional law (the finite-scale face of closure under
        # conditioning).
        fps = chsh_distribution("analytic")
        world = sample_world(fps, 100_000, seed=42)
        event = coin_event(1, 1)
        report = run_battery(condition_seq(world, event), fps.condition(event))
        assert report.all_pass

    def test_deterministic(self):
        fps = chsh_distribution("analytic")
        world = sample_world(fps, 50_000, seed=9)
        r1 = run_battery(world, fps, (1, 2))
        r2 = run_battery(world, fps, (1, 2))
        assert r1 == r2

    def test_requires_block_lengths(self):
        world = sample_world(fair_coin(), 100, seed=1)
        with pytest.raises(ValueError, match="block length"):
            run_battery(world, fair_coin(), ())

    def test_report_dict_shape(self):
        world = sample_world(fair_coin(), 1000, seed=4)
        report = run_battery(world, fair_coin(), (1, 2))
        d = report.to_dict()
        assert d["total"] == 2
        assert {t["block_len"] for t in d["tests"]} == {1, 2}
        assert isinstance(report, BatteryReport)
