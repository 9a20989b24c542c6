"""Inductive and destructive samplers and their exact probabilities."""

import math
import random
from fractions import Fraction

import pytest

from ascsampler.core import (
    LabeledComplex,
    build_layout,
    complete_state,
    empty_state,
    validate_closure,
)
from ascsampler.enumeration import enumerate_labeled
from ascsampler.samplers import (
    KahleParams,
    LevelRecord,
    balanced_level_prob,
    balanced_log_prob_labeled,
    balanced_min_prob_estimate,
    balanced_prob_exact,
    balanced_sample,
    balanced_trace_of,
    geometric_prob,
    geometric_prob_exact,
    kahle_log_prob,
    kahle_min_prob,
    kahle_min_prob_exact,
    kahle_sample,
)


def state_of(n, mask):
    bits = 0
    for i, ch in enumerate(mask):
        if ch == "1":
            bits |= 1 << i
    return LabeledComplex(n, bits)


# ---------------------------------------------------------------- Kahle


def test_kahle_params_validation():
    KahleParams(3, (0.0, 1.0))  # closed endpoints are allowed
    assert KahleParams.uniform(4, 0.5).probs == (0.5, 0.5, 0.5)
    assert KahleParams.uniform(4, 0.3).p_for_level(3) == 0.3
    with pytest.raises(ValueError):
        KahleParams(3, (0.5,))
    with pytest.raises(ValueError):
        KahleParams(3, (0.5, 1.5))
    with pytest.raises(ValueError):
        KahleParams(3, (-0.1, 0.5))


def test_kahle_degenerate_limits():
    rng = random.Random(2)
    all_on = KahleParams.uniform(4, 1.0)
    no_edges = KahleParams.uniform(4, 0.0)
    edges_only = KahleParams(3, (1.0, 0.0))
    for _ in range(20):
        assert kahle_sample(all_on, rng) == complete_state(4)
        assert kahle_sample(no_edges, rng) == empty_state(4)
        assert kahle_sample(edges_only, rng) == state_of(3, "1111110")


def test_kahle_log_prob_benchmark_values():
    half = KahleParams.uniform(3, 0.5)
    assert kahle_log_prob(complete_state(3), half) == math.log(1 / 16)
    assert kahle_log_prob(empty_state(3), half) == math.log(1 / 8)


def test_kahle_half_floor_is_the_complete_state():
    # At p = 1/2 a state's probability is (1/2)**(eligible coins), and the
    # complete state resolves the most coins, so it sits on the floor.
    half = KahleParams.uniform(3, 0.5)
    floor = math.log(kahle_min_prob(3))
    assert kahle_log_prob(complete_state(3), half) == floor
    for c in enumerate_labeled(3).states:
        assert kahle_log_prob(c, half) >= floor


def test_kahle_log_prob_degenerate_impossible_states():
    all_on = KahleParams.uniform(3, 1.0)
    no_edges = KahleParams.uniform(3, 0.0)
    assert kahle_log_prob(empty_state(3), all_on) == -math.inf
    assert kahle_log_prob(complete_state(3), no_edges) == -math.inf
    assert kahle_log_prob(complete_state(3), all_on) == 0.0


def test_kahle_log_prob_input_checks():
    half = KahleParams.uniform(3, 0.5)
    with pytest.raises(ValueError):
        kahle_log_prob(complete_state(4), half)
    with pytest.raises(ValueError):
        kahle_log_prob(state_of(3, "1110001"), half)


def _kahle_reference_log_prob(c, params):
    """Straight per-level product, no count aggregation."""
    layout = build_layout(c.n)
    total = 0.0
    for d in range(2, c.n + 1):
        p = params.p_for_level(d)
        for i in layout.level_ranges[d - 1]:
            if all((c.bits >> f) & 1 for f in layout.faces[i]):
                total += math.log(p) if (c.bits >> i) & 1 else math.log1p(-p)
    return total


def test_kahle_log_prob_matches_reference_formula():
    params = KahleParams(4, (0.3, 0.7, 0.45))
    for c in enumerate_labeled(4).states:
        assert kahle_log_prob(c, params) == pytest.approx(
            _kahle_reference_log_prob(c, params), abs=1e-12
        )


def test_kahle_min_prob_values():
    assert kahle_min_prob(3) == 1 / 16
    assert kahle_min_prob(4) == 2.0**-11
    assert kahle_min_prob_exact(3) == Fraction(1, 16)
    values = [kahle_min_prob(n) for n in range(2, 11)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_balanced_beats_kahle_floor():
    for n in range(3, 21):
        assert Fraction(1, 2**n - n) > kahle_min_prob_exact(n)


# -------------------------------------------------------------- balanced


def test_balanced_level_prob_examples():
    assert balanced_level_prob(5, 3) == (0.2, 0.4)
    assert balanced_level_prob(2, 1) == (0.5, 0.5)
    p_move, p_zero = balanced_level_prob(7, 0)
    assert p_zero == 1.0 and p_move == 1 / 7
    with pytest.raises(ValueError):
        balanced_level_prob(3, 3)
    with pytest.raises(ValueError):
        balanced_level_prob(3, -1)


def test_level_record_validation():
    rec = LevelRecord(level=2, available=3, removed=2, total_remaining=5)
    assert rec.p_move == 0.2
    assert rec.p_zero == 0.4
    assert rec.selection_count == 3
    with pytest.raises(ValueError):
        LevelRecord(level=2, available=3, removed=4, total_remaining=5)
    with pytest.raises(ValueError):
        LevelRecord(level=2, available=3, removed=0, total_remaining=3)


def test_balanced_sample_n2_is_a_coin_flip():
    rng = random.Random(3)
    seen = set()
    for _ in range(64):
        c, trace = balanced_sample(2, rng)
        seen.add(c.bits)
        assert trace.prob_exact() == Fraction(1, 2)
    assert seen == {complete_state(2).bits, empty_state(2).bits}


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_balanced_sample_outputs_are_closed(n):
    rng = random.Random(40 + n)
    for _ in range(300):
        c, trace = balanced_sample(n, rng)
        assert validate_closure(c)
        assert trace.log_prob() == pytest.approx(balanced_log_prob_labeled(c), abs=1e-12)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_trace_reconstruction_is_exact(n):
    # The removal trace is a function of the final state alone; the
    # reconstruction must reproduce the sampled records field by field.
    rng = random.Random(70 + n)
    for _ in range(10_000):
        c, trace = balanced_sample(n, rng)
        assert balanced_trace_of(c).records == trace.records


def test_trace_of_empty_state():
    records = balanced_trace_of(empty_state(3)).records
    assert records[0] == LevelRecord(level=2, available=3, removed=3, total_remaining=5)
    assert records[1] == LevelRecord(level=3, available=0, removed=0, total_remaining=1)


def test_trace_of_complete_state():
    records = balanced_trace_of(complete_state(3)).records
    assert records[0] == LevelRecord(level=2, available=3, removed=0, total_remaining=5)
    assert records[1] == LevelRecord(level=3, available=1, removed=0, total_remaining=2)


def test_trace_of_full_edge_set():
    records = balanced_trace_of(state_of(3, "1111110")).records
    assert records[0] == LevelRecord(level=2, available=3, removed=0, total_remaining=5)
    assert records[1] == LevelRecord(level=3, available=1, removed=1, total_remaining=2)


def test_trace_of_one_edge_removed():
    # Removing one edge prunes the triangle, so level 3 has nothing left.
    records = balanced_trace_of(state_of(3, "1110110")).records
    assert records[0] == LevelRecord(level=2, available=3, removed=1, total_remaining=5)
    assert records[1] == LevelRecord(level=3, available=0, removed=0, total_remaining=1)


def test_balanced_log_prob_benchmark_values():
    assert balanced_prob_exact(complete_state(3)) == Fraction(1, 5)
    assert balanced_prob_exact(empty_state(3)) == Fraction(1, 5)
    assert balanced_prob_exact(state_of(3, "1110110")) == Fraction(1, 15)
    assert balanced_log_prob_labeled(complete_state(3)) == pytest.approx(
        math.log(0.2), abs=1e-12
    )
    assert balanced_log_prob_labeled(state_of(3, "1110110")) == pytest.approx(
        math.log(1 / 15), abs=1e-12
    )


def test_balance_identity_exact():
    for n in range(2, 13):
        target = Fraction(1, 2**n - n)
        assert balanced_prob_exact(complete_state(n)) == target
        assert balanced_prob_exact(empty_state(n)) == target


def test_balanced_log_prob_rejects_open_states():
    with pytest.raises(ValueError):
        balanced_log_prob_labeled(state_of(3, "1110001"))


def test_geometric_prob_n3_uniform():
    for c in enumerate_labeled(3).states:
        assert geometric_prob(c) == pytest.approx(0.2, abs=1e-12)
        assert geometric_prob_exact(c) == Fraction(1, 5)


def test_geometric_prob_complete_n4():
    assert geometric_prob_exact(complete_state(4)) == Fraction(1, 12)
    assert geometric_prob(complete_state(4)) == pytest.approx(1 / 12, abs=1e-12)


def test_geometric_prob_sums_to_one_over_classes():
    total = Fraction(0)
    for key in enumerate_labeled(4).classes:
        total += geometric_prob_exact(key.state())
    assert total == 1


# ------------------------------------------------- lower-bound estimate


def test_min_prob_estimate_small_values():
    assert balanced_min_prob_estimate(3) == pytest.approx(5 / 3, rel=1e-12)
    assert balanced_min_prob_estimate(4) == pytest.approx(3 / 5, rel=1e-12)
    # n = 5 runs levels 2..3; both tails computed by hand.
    expected = Fraction(27, math.comb(10, 5)) * Fraction(17, math.comb(10, 5))
    assert balanced_min_prob_estimate(5) == pytest.approx(float(expected), rel=1e-12)
