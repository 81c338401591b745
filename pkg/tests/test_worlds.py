"""Tests for world sampling, sequence operators and frequency reports."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from typicality_lab.chsh import chsh_distribution, coin_event
from typicality_lab.spaces import FiniteProbabilitySpace, fair_coin, product, uniform
from typicality_lab.worlds import (
    BLOCK_LEN,
    GENERATOR_ID,
    WorldPrefix,
    condition_seq,
    empirical,
    lln_report,
    project_seq,
    sample_world,
    zip_seqs,
)

SQRT2 = math.sqrt(2.0)


@st.composite
def small_worlds(draw):
    size = draw(st.integers(min_value=1, max_value=4))
    length = draw(st.integers(min_value=0, max_value=40))
    indices = draw(
        st.lists(st.integers(0, size - 1), min_size=length, max_size=length)
    )
    return WorldPrefix(range(size), indices)


class TestSampling:
    def test_degenerate_space_is_constant(self):
        fps = FiniteProbabilitySpace(["a", "b"], [1.0, 0.0])
        world = sample_world(fps, 500, seed=9)
        assert world.symbols() == ["a"] * 500

    def test_fair_coin_frequency(self):
        world = sample_world(fair_coin(), 100_000, seed=5)
        freq = empirical(world).frequency(0)
        # 3 sigma is ~0.0047 at this length; the band is widened to 0.01.
        assert abs(freq - 0.5) <= 0.01

    def test_zero_weight_symbol_never_appears(self):
        fps = FiniteProbabilitySpace(["a", "z", "b"], [0.4, 0.0, 0.6])
        world = sample_world(fps, 200_000, seed=17)
        assert empirical(world).counts["z"] == 0

    def test_trailing_zero_weight_symbol_never_appears(self):
        fps = FiniteProbabilitySpace(["a", "b", "z"], [0.4, 0.6, 0.0])
        world = sample_world(fps, 200_000, seed=18)
        assert empirical(world).counts["z"] == 0

    def test_reproducible(self):
        fps = uniform("abc")
        w1 = sample_world(fps, 10_000, seed=77)
        w2 = sample_world(fps, 10_000, seed=77)
        assert w1 == w2
        assert w1.symbols() == w2.symbols()

    def test_threads_do_not_change_output(self):
        fps = chsh_distribution("analytic")
        length = 3 * BLOCK_LEN + 17
        base = sample_world(fps, length, seed=42)
        for threads in (2, 4, 8):
            assert sample_world(fps, length, seed=42, threads=threads) == base

    def test_prefix_consistency_across_lengths(self):
        # Blocked generation makes a longer run extend a shorter one.
        fps = uniform("xy")
        short = sample_world(fps, BLOCK_LEN + 10, seed=3)
        longer = sample_world(fps, 2 * BLOCK_LEN, seed=3)
        np.testing.assert_array_equal(
            longer.indices[: len(short)], short.indices
        )

    def test_provenance_recorded(self):
        world = sample_world(fair_coin(), 10, seed=4)
        prov = world.provenance
        assert prov["kind"] == "sampled"
        assert prov["seed"] == 4
        assert prov["generator"] == GENERATOR_ID
        assert prov["length"] == 10

    def test_boundary_ties_resolve_to_the_later_symbol(self):
        # The inverse-CDF intervals are half-open: a draw landing exactly
        # on a boundary belongs to the later symbol, and a zero-weight
        # symbol (whose boundary equals its predecessor's) gets nothing.
        from typicality_lab.worlds import _cumulative_boundaries

        fps = FiniteProbabilitySpace(["a", "z", "b"], [0.25, 0.0, 0.75])
        cum = _cumulative_boundaries(fps)
        np.testing.assert_array_equal(cum, [0.25, 0.25, 1.0])
        draws = np.array([0.0, 0.2499, 0.25, 0.999])
        picks = np.searchsorted(cum, draws, side="right")
        assert picks.tolist() == [0, 0, 2, 2]  # 0.25 goes to "b", never "z"

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError, match="length"):
            sample_world(fair_coin(), 0, seed=1)
        with pytest.raises(ValueError, match="seed"):
            sample_world(fair_coin(), 10, seed=-3)
        with pytest.raises(ValueError, match="seed"):
            sample_world(fair_coin(), 10, seed=2**64)
        with pytest.raises(ValueError, match="threads"):
            sample_world(fair_coin(), 10, seed=1, threads=0)


class TestConditionSeq:
    def test_full_alphabet_is_identity(self):
        world = sample_world(uniform("ab"), 100, seed=1)
        cond = condition_seq(world, ["a", "b"])
        assert cond.symbols() == world.symbols()

    def test_filter_by_inspection(self):
        world = WorldPrefix.from_symbols("abx", ["a", "x", "b", "x", "a"])
        cond = condition_seq(world, {"a", "b"})
        assert cond.symbols() == ["a", "b", "a"]
        assert cond.alphabet == ("a", "b")

    def test_empty_result_allowed(self):
        world = WorldPrefix.from_symbols("ab", ["a", "a"])
        cond = condition_seq(world, ["b"])
        assert len(cond) == 0

    def test_length_identity(self):
        world = sample_world(uniform("abc"), 5000, seed=2)
        stats = empirical(world)
        cond = condition_seq(world, ["a", "c"])
        assert len(cond) == stats.counts["a"] + stats.counts["c"]

    def test_chsh_conditional_frequencies(self):
        # Conditioned subsequences approach the conditional law; 4 sigma band.
        fps = chsh_distribution("analytic")
        world = sample_world(fps, 100_000, seed=31)
        event = coin_event(0, 0)
        cond = condition_seq(world, event)
        conditional = fps.condition(event)
        stats = empirical(cond)
        for outcome in conditional.alphabet:
            p = conditional.prob(outcome)
            sigma = math.sqrt(p * (1 - p) / len(cond))
            assert abs(stats.frequency(outcome) - p) <= 4 * sigma

    def test_provenance_records_parent(self):
        world = sample_world(fair_coin(), 50, seed=11)
        cond = condition_seq(world, [0])
        assert cond.provenance["kind"] == "conditioned"
        assert cond.provenance["parent"]["kind"] == "sampled"

    def test_foreign_symbol_rejected(self):
        world = WorldPrefix.from_symbols("ab", ["a"])
        with pytest.raises(ValueError, match="not in the alphabet"):
            condition_seq(world, ["q"])


class TestProjectZip:
    def test_project_inverts_zip(self):
        w1 = sample_world(uniform("ab"), 300, seed=6)
        w2 = sample_world(uniform((0, 1, 2)), 300, seed=7)
        zipped = zip_seqs([w1, w2])
        assert project_seq(zipped, 0) == w1
        assert project_seq(zipped, 1) == w2

    def test_small_projection(self):
        world = WorldPrefix.from_symbols(
            tuple(itertools.product((0, 1), (1, -1))), [(0, 1), (1, -1)]
        )
        assert project_seq(world, 1).symbols() == [1, -1]

    def test_multi_coordinate_projection(self):
        fps = chsh_distribution("analytic")
        world = sample_world(fps, 80_000, seed=12)
        coins = project_seq(world, (0, 1))
        stats = empirical(coins)
        assert coins.alphabet == tuple(itertools.product((0, 1), (0, 1)))
        for pair in coins.alphabet:
            sigma = math.sqrt(0.25 * 0.75 / len(coins))
            assert abs(stats.frequency(pair) - 0.25) <= 4 * sigma

    def test_zip_singleton(self):
        w = sample_world(fair_coin(), 20, seed=3)
        z = zip_seqs([w])
        assert z.symbols() == [(s,) for s in w.symbols()]

    def test_zip_pair_by_inspection(self):
        w1 = WorldPrefix.from_symbols((0, 1), [0, 1])
        w2 = WorldPrefix.from_symbols((1, -1), [1, -1])
        assert zip_seqs([w1, w2]).symbols() == [(0, 1), (1, -1)]

    def test_zip_length_mismatch(self):
        w1 = WorldPrefix.from_symbols((0, 1), [0, 1])
        w2 = WorldPrefix.from_symbols((0, 1), [0])
        with pytest.raises(ValueError, match="equal-length"):
            zip_seqs([w1, w2])

    def test_project_requires_tuples(self):
        with pytest.raises(ValueError, match="tuples"):
            project_seq(sample_world(fair_coin(), 5, seed=1), 0)

    def test_zip_alphabet_matches_product_space(self):
        w1 = sample_world(uniform("ab"), 10, seed=1)
        w2 = sample_world(fair_coin(), 10, seed=2)
        zipped = zip_seqs([w1, w2])
        joint = product(uniform("ab"), fair_coin())
        assert zipped.alphabet == joint.alphabet

    def test_zip_of_independent_coins_is_typical_for_the_product(self):
        # Independence at finite scale: the pair sequence passes the
        # block-frequency battery against the product law.
        from typicality_lab.battery import run_battery

        w1 = sample_world(fair_coin(), 40_000, seed=61)
        w2 = sample_world(fair_coin(), 40_000, seed=62)
        pair = zip_seqs([w1, w2])
        report = run_battery(pair, product(fair_coin(), fair_coin()))
        assert report.all_pass


class TestEmpiricalAndLln:
    def test_constant_world(self):
        world = WorldPrefix.from_symbols("a", ["a"] * 7)
        stats = empirical(world)
        assert stats.counts == {"a": 7}
        assert stats.total == 7

    def test_counts_by_inspection(self):
        world = WorldPrefix.from_symbols("ab", ["a", "b", "a"])
        assert empirical(world).counts == {"a": 2, "b": 1}

    def test_chsh_frequencies_within_four_sigma(self):
        fps = chsh_distribution("analytic")
        world = sample_world(fps, 200_000, seed=23)
        stats = empirical(world)
        for outcome in fps.alphabet:
            p = fps.prob(outcome)
            sigma = math.sqrt(p * (1 - p) / len(world))
            assert abs(stats.frequency(outcome) - p) <= 4 * sigma

    def test_lln_degenerate(self):
        fps = FiniteProbabilitySpace(["a", "b"], [1.0, 0.0])
        world = sample_world(fps, 100, seed=2)
        report = lln_report(world, fps)
        by_symbol = {row.symbol: row for row in report.rows}
        assert by_symbol["a"].z == 0.0
        assert by_symbol["b"].z == 0.0

    def test_lln_fair_coin(self):
        world = sample_world(fair_coin(), 10_000, seed=123)
        report = lln_report(world, fair_coin())
        assert report.max_abs_z <= 4.0
        assert report.flagged == ()

    def test_lln_zero_weight_hit_is_hard_failure(self):
        fps = FiniteProbabilitySpace(["a", "z"], [1.0, 0.0])
        world = WorldPrefix.from_symbols(["a", "z"], ["a", "z", "a"])
        report = lln_report(world, fps)
        by_symbol = {row.symbol: row for row in report.rows}
        assert by_symbol["z"].z == float("inf")
        assert by_symbol["z"] in report.flagged

    def test_lln_flags_biased_world(self):
        world = WorldPrefix.from_symbols((0, 1), [0] * 900 + [1] * 100)
        report = lln_report(world, fair_coin(), threshold=4.0)
        assert len(report.flagged) == 2

    def test_alphabet_mismatch_rejected(self):
        world = sample_world(fair_coin(), 10, seed=1)
        with pytest.raises(ValueError, match="alphabets differ"):
            lln_report(world, uniform("ab"))


class TestPrefixCommutation:
    @given(small_worlds(), st.data())
    @settings(max_examples=60, derandomize=True)
    def test_condition_commutes_with_prefix(self, world, data):
        event = data.draw(
            st.sets(st.sampled_from(list(world.alphabet)), min_size=1)
        )
        n = data.draw(st.integers(0, len(world)))
        cond_of_prefix = condition_seq(world.prefix(n), event)
        prefix_of_cond = condition_seq(world, event).prefix(len(cond_of_prefix))
        assert cond_of_prefix.symbols() == prefix_of_cond.symbols()

    @given(small_worlds(), st.integers(0, 40))
    @settings(max_examples=60, derandomize=True)
    def test_project_commutes_with_prefix(self, base, raw_n):
        world = zip_seqs([base, base])
        n = min(raw_n, len(world))
        left = project_seq(world.prefix(n), 0)
        right = project_seq(world, 0).prefix(n)
        assert left.symbols() == right.symbols()


class TestExportImport:
    def test_text_round_trip(self):
        fps = chsh_distribution("analytic")
        world = sample_world(fps, 200, seed=14)
        text = world.to_text()
        assert "\n" not in text
        again = WorldPrefix.from_text(text, world.alphabet)
        assert again.symbols() == world.symbols()

    def test_text_token_format(self):
        world = WorldPrefix.from_symbols(
            tuple(itertools.product((0, 1), (1, -1))), [(0, 1), (1, -1)]
        )
        assert world.to_text() == "0|1,1|-1"

    def test_json_round_trip(self):
        fps = chsh_distribution("analytic")
        world = sample_world(fps, 500, seed=15)
        again = WorldPrefix.from_json(world.to_json())
        assert again == world
        assert again.provenance == world.provenance

    def test_json_accepts_symbols_field(self):
        obj = {"alphabet": ["a", "b"], "symbols": ["b", "a", "b"]}
        world = WorldPrefix.from_json(obj)
        assert world.symbols() == ["b", "a", "b"]

    def test_from_text_rejects_unknown_token(self):
        with pytest.raises(ValueError, match="unknown symbol token"):
            WorldPrefix.from_text("a,q", ("a", "b"))

    def test_from_json_rejects_missing_data(self):
        with pytest.raises(ValueError, match="indices"):
            WorldPrefix.from_json({"alphabet": ["a"]})
