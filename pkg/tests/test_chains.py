import math

import numpy as np
import pytest

from flmlab.benchmarks import make_benchmark
from flmlab.chains import (
    LevelChain,
    expected_hitting_time,
    full_state_expected_time,
    jump_level_matrix,
    longpath_level_matrix,
    mutation_class_row,
    onemax_level_matrix,
    onemax_transition_prob,
    skip_probability,
    summarize,
    truncate_chain,
    visit_probabilities,
    visit_probability_matrix,
)
from flmlab.formulas import leadingones_exact

from conftest import brute_mutation_distribution, random_level_chain


def hand_chain():
    # start at level 0; leaving level 0 goes up with two equally weighted exits
    t = np.array([[0.5, 0.25, 0.25], [0.0, 0.0, 1.0], [0.0, 0.0, 1.0]])
    return LevelChain(t, np.array([1.0, 0.0, 0.0]))


def test_transition_prob_trivial_cases():
    assert onemax_transition_prob(2, 0.5, 0, 2) == pytest.approx(0.25, abs=1e-15)
    # derived by enumerating all four flip masks of a one-one parent
    assert onemax_transition_prob(2, 0.5, 1, 2) == pytest.approx(0.25, abs=1e-15)


def test_transition_prob_rejects_out_of_range():
    with pytest.raises(ValueError):
        onemax_transition_prob(4, 0.1, 5, 2)
    with pytest.raises(ValueError):
        onemax_transition_prob(4, 0.1, 2, -1)


@pytest.mark.parametrize("n,p", [(3, 0.5), (4, 1 / 3), (5, 0.1), (6, 0.9)])
def test_mutation_rows_match_brute_force(n, p):
    for k in range(n + 1):
        x = np.array([1] * k + [0] * (n - k), dtype=np.uint8)
        expected = brute_mutation_distribution(x, p)
        np.testing.assert_allclose(mutation_class_row(n, p, k), expected, atol=1e-14)


def test_mutation_row_total_probability():
    for k in (0, 7, 13, 20):
        row = mutation_class_row(20, 1 / 20, k)
        assert abs(row.sum() - 1.0) < 1e-10


def test_log_space_survives_large_dimension():
    for n in (1000, 2000):
        for k in (0, n // 2, n - 1):
            assert onemax_transition_prob(n, 1 / n, k, k + 1) > 0.0
    # naive direct evaluation hits p^150 = 0 long before this value (~1e-262)
    deep_tail = onemax_transition_prob(1000, 1 / 1000, 0, 150)
    assert 0.0 < deep_tail < 1e-200


def test_log_space_agrees_with_direct_evaluation():
    # direct two-binomial sum, safe at small n
    n, p, k = 12, 0.3, 5
    for l in range(n + 1):
        direct = sum(
            math.comb(n - k, u) * math.comb(k, u - (l - k)) * p ** (2 * u - l + k) * (1 - p) ** (n - 2 * u + l - k)
            for u in range(max(0, l - k), min(n - k, l) + 1)
        )
        assert onemax_transition_prob(n, p, k, l) == pytest.approx(direct, rel=1e-10)


def test_onemax_matrix_single_bit():
    chain = onemax_level_matrix(1, 0.5)
    assert chain.transition[0, 1] == pytest.approx(0.5, abs=1e-15)
    assert chain.transition[0, 0] == pytest.approx(0.5, abs=1e-15)


def test_onemax_matrix_rows_sum_to_one():
    chain = onemax_level_matrix(10, 0.1)
    np.testing.assert_allclose(chain.transition.sum(axis=1), 1.0, atol=1e-12)


def test_chain_validation_rejects_bad_inputs():
    with pytest.raises(ValueError):
        LevelChain(np.array([[0.5, 0.4], [0.0, 1.0]]), np.array([1.0, 0.0]))  # row sum
    with pytest.raises(ValueError):
        LevelChain(np.array([[0.5, 0.5], [0.1, 0.9]]), np.array([1.0, 0.0]))  # decreasing move
    with pytest.raises(ValueError):
        LevelChain(np.eye(2), np.array([0.7, 0.7]))  # start not a distribution


def test_visit_probabilities_hand_chain():
    np.testing.assert_allclose(visit_probabilities(hand_chain()), [1.0, 0.5, 1.0], atol=1e-15)


def test_visit_probabilities_point_mass_at_top():
    t = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.0, 0.0, 1.0]])
    chain = LevelChain(t, np.array([0.0, 0.0, 1.0]))
    np.testing.assert_allclose(visit_probabilities(chain), [0.0, 0.0, 1.0], atol=1e-15)


def test_visit_probabilities_absorbing_interior_rejected():
    t = np.array([[0.5, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    chain = LevelChain(t, np.array([1.0, 0.0, 0.0]))
    with pytest.raises(ValueError, match="absorbing"):
        visit_probabilities(chain)


def test_expected_hitting_time_hand_chain():
    overall, per_level = expected_hitting_time(hand_chain())
    assert overall == pytest.approx(2.5, abs=1e-12)  # E0 = 2 + 0.5 * 1
    assert per_level[1] == pytest.approx(1.0, abs=1e-12)


def test_expected_hitting_time_geometric():
    t = np.array([[0.75, 0.25], [0.0, 1.0]])
    chain = LevelChain(t, np.array([1.0, 0.0]))
    overall, _ = expected_hitting_time(chain)
    assert overall == pytest.approx(4.0, abs=1e-12)


def test_identity_visits_over_rates_on_random_chains(rng):
    for _ in range(300):
        chain = random_level_chain(rng, int(rng.integers(2, 9)))
        v = visit_probabilities(chain)
        overall, _ = expected_hitting_time(chain)
        identity = float(np.sum(v[:-1] / chain.leave_probs[:-1]))
        assert abs(identity - overall) < 1e-9


def test_visit_probability_matrix_matches_point_mass_runs(rng):
    chain = random_level_chain(rng, 7)
    matrix = visit_probability_matrix(chain)
    for k in range(7):
        point = LevelChain(chain.transition, np.eye(7)[k])
        np.testing.assert_allclose(matrix[k], visit_probabilities(point), atol=1e-12)


def test_skip_probability_top_level_never_skipped(rng):
    chain = random_level_chain(rng, 6)
    assert skip_probability(chain, 5, 5) == pytest.approx(0.0, abs=1e-12)


def test_skip_probability_covering_start_mass_is_zero():
    chain = hand_chain()
    assert skip_probability(chain, 0, 1) == pytest.approx(0.0, abs=1e-15)


def test_skip_probability_hand_value():
    # skipping level 1 of the hand chain: leave 0 directly to level 2
    assert skip_probability(hand_chain(), 1, 1) == pytest.approx(0.5, abs=1e-15)


def test_jump_chain_gap_moves_toward_both_sides():
    chain = jump_level_matrix(4, 2, 1 / 4)
    labels = list(chain.labels)
    i3, i2, i4 = labels.index(3), labels.index(2), labels.index(4)
    assert chain.transition[i3, i4] > 0.0  # optimum reachable from the gap
    assert chain.transition[i3, i2] > 0.0  # and the better non-gap class too
    assert i2 > i3  # fitness 4 beats fitness 1 in the level order


def test_jump_chain_rows_sum_to_one():
    chain = jump_level_matrix(14, 3, 1 / 14)
    np.testing.assert_allclose(chain.transition.sum(axis=1), 1.0, atol=1e-12)


@pytest.mark.parametrize("n,k", [(8, 2), (10, 3), (12, 3)])
def test_jump_chain_matches_full_state(n, k):
    benchmark = make_benchmark("jump", n, k)
    oracle = full_state_expected_time(benchmark, 1 / n)
    chain = jump_level_matrix(n, k, 1 / n)
    overall, _ = expected_hitting_time(chain)
    assert abs(overall - oracle.expected_time) < 1e-6


def test_onemax_chain_matches_full_state():
    benchmark = make_benchmark("onemax", 8)
    oracle = full_state_expected_time(benchmark, 1 / 8)
    overall, _ = expected_hitting_time(onemax_level_matrix(8, 1 / 8))
    assert abs(overall - oracle.expected_time) < 1e-6


def test_jump_skip_probability_desk_check():
    # non-gap region of jump(10, 3) under random initialization
    chain = jump_level_matrix(10, 3, 1 / 10)
    labels = list(chain.labels)
    block = [i for i, a in enumerate(labels) if a <= 10 - 3]
    assert block == list(range(min(block), max(block) + 1))
    q = skip_probability(chain, min(block), max(block))
    assert q <= 20 * 2**-10


def test_full_state_single_bit_onemax():
    result = full_state_expected_time(make_benchmark("onemax", 1), 0.5)
    assert result.expected_time == pytest.approx(1.0, abs=1e-12)


def test_full_state_leadingones_matches_closed_form():
    result = full_state_expected_time(make_benchmark("leadingones", 2), 0.5)
    assert result.expected_time == pytest.approx(3.0, abs=1e-9)
    assert result.expected_time == pytest.approx(leadingones_exact(2, 0.5), abs=1e-9)


def test_full_state_rejects_large_dimension():
    with pytest.raises(ValueError):
        full_state_expected_time(make_benchmark("onemax", 15), 0.1)


def test_full_state_fixed_level_start():
    result = full_state_expected_time(make_benchmark("onemax", 6), 1 / 6, start=6)
    assert result.expected_time == pytest.approx(0.0, abs=1e-12)
    chain = onemax_level_matrix(6, 1 / 6, start=3)
    overall, _ = expected_hitting_time(chain)
    fixed = full_state_expected_time(make_benchmark("onemax", 6), 1 / 6, start=3)
    assert abs(overall - fixed.expected_time) < 1e-9


def test_truncate_chain_gives_partial_passage_times():
    n = 10
    chain = onemax_level_matrix(n, 1 / n, start=2)
    truncated = truncate_chain(chain, 7)
    overall, times = expected_hitting_time(truncated)
    # against an independent absorbing-state solve on the original matrix
    q = chain.transition[:7, :7]
    direct = np.linalg.solve(np.eye(7) - q, np.ones(7))
    assert overall == pytest.approx(direct[2], rel=1e-12)
    assert times[2] == pytest.approx(direct[2], rel=1e-12)


def test_longpath_chain_against_full_state():
    bm = make_benchmark("longpath", 6, 3)
    chain = longpath_level_matrix(bm.path, 1 / 6)
    overall, _ = expected_hitting_time(chain)
    oracle = full_state_expected_time(bm, 1 / 6, start=bm.path.points[0])
    assert abs(overall - oracle.expected_time) < 1e-8


def test_summary_bundles_consistent_values():
    chain = onemax_level_matrix(12, 1 / 12)
    summary = summarize(chain)
    np.testing.assert_allclose(summary.skip_probs, 1.0 - summary.visit_probs, atol=1e-15)
    assert summary.expected_time == pytest.approx(
        float(np.sum(summary.visit_probs[:-1] / summary.leave_probs)), abs=1e-9
    )
