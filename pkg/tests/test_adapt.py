import math

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from helpers import rect
from supframe.adapt.costs import concentration, concentration_score, entropy_cost, piece_coefficients
from supframe.adapt.dynamic import dominance_sets, dp_adapt, dp_search, solve_prefix
from supframe.adapt.greedy import greedy_adapt, greedy_search
from supframe.errors import ConfigError
from supframe.frames.gabor import GaborSystem
from supframe.frames.superposition import OrderedPartition, Piece, iter_partitions, validate_partition
from supframe.frames.windows import make_window


@pytest.fixture
def tone_system():
    return GaborSystem(rect(8, 256), 8, 256)


@pytest.fixture
def tone():
    return np.exp(2j * np.pi * 0.1 * np.arange(256))


# ============================
# Costs
# ============================

def test_concentration_score_extremes():
    assert concentration_score(np.array([0, 3.0, 0, 0])) == 1.0
    assert np.isclose(concentration_score(np.ones(8)), 1 / 8)
    assert concentration_score(np.zeros(5)) == 0.0


@pytest.mark.parametrize("r", [0, 1, 2, 3, 7])
def test_concentration_of_a_tone_through_rect_windows(tone_system, tone, r):
    ell = 8 * (r + 1)
    expected = (2 * ell ** 2 + 1) / (3 * 256 * ell)
    assert np.isclose(concentration(tone, tone_system, 4, r), expected, rtol=1e-10)


def test_concentration_of_silence_is_zero(tone_system):
    assert concentration(np.zeros(256), tone_system, 0, 2) == 0.0


def test_piece_coefficients_use_local_modulation_count(ola_hamming, rng):
    x = rng.standard_normal(64)
    assert piece_coefficients(x, ola_hamming, 0, 0).shape == (16,)
    assert piece_coefficients(x, ola_hamming, 3, 2).shape == (32,)


def test_entropy_cost():
    assert np.isclose(entropy_cost(np.ones(4)), math.log(4))
    assert entropy_cost(np.array([0, 2.0, 0])) == 0.0
    assert entropy_cost(np.zeros(3)) == 0.0
    assert np.isclose(entropy_cost(np.array([1.0, 0.0]), 4.0), -0.25 * math.log(0.25))


def test_entropy_is_additive_under_a_common_normalization(rng):
    a, b = rng.standard_normal(6), rng.standard_normal(9)
    total = float(np.sum(a ** 2) + np.sum(b ** 2))
    joint = entropy_cost(np.concatenate([a, b]), total)
    assert np.isclose(entropy_cost(a, total) + entropy_cost(b, total), joint, rtol=1e-12)


# ============================
# Greedy
# ============================

def test_greedy_merges_a_stationary_tone(tone_system, tone):
    result = greedy_search(tone, tone_system, r_max=3)
    assert result.partition.pieces == tuple(Piece(n, 3) for n in range(0, 32, 4))
    assert validate_partition(result.partition) is None


def test_greedy_skip_reset_leaves_singletons(tone_system, tone):
    result = greedy_search(tone, tone_system, r_max=3, reset="skip")
    partition = result.partition
    expected = []
    for block in range(0, 32, 8):
        expected.append(Piece(block, 3))
        expected.extend(Piece(k, 0) for k in range(block + 4, block + 8))
    assert partition.pieces == tuple(expected)
    assert len(partition.pieces) == 20
    # after each rejection the next piece starts past the singletons with the same order
    rejected = [(prop.anchor, prop.order, prop.candidate) for prop in result.trace if not prop.accepted]
    assert rejected == [(0, 3, 4), (8, 3, 12), (16, 3, 20), (24, 3, 28)]
    assert sum(prop.accepted for prop in result.trace) == 3


def test_greedy_skip_reset_clips_the_kept_order(tone):
    g = GaborSystem(rect(8, 96), 8, 96)
    result = greedy_search(tone[:96], g, r_max=3, reset="skip")
    # 12 translates: (0, 3), singles 4..7, then order 3 clipped to (8, 3) at the end
    assert result.partition.pieces == (Piece(0, 3), *(Piece(k, 0) for k in range(4, 8)), Piece(8, 3))
    assert validate_partition(result.partition) is None

    short = GaborSystem(rect(8, 80), 8, 80)
    result = greedy_search(tone[:80], short, r_max=3, reset="skip")
    # 10 translates: the kept order 3 at anchor 8 is clipped to 1
    assert result.partition.pieces[-1] == Piece(8, 1)
    assert validate_partition(result.partition) is None


def test_greedy_rejects_merging_separate_impulses():
    g = GaborSystem(rect(8, 64), 8, 8)
    x = np.zeros(64)
    x[4::8] = 1.0
    result = greedy_search(x, g)
    assert result.partition == OrderedPartition.uniform(8)
    assert not any(p.accepted for p in result.trace)


def test_greedy_trace_replays(rng, ola_hamming):
    x = rng.standard_normal(64)
    result = greedy_search(x, ola_hamming, r_max=3)
    for prop in result.trace:
        if math.isnan(prop.merged):
            assert not prop.accepted
            continue
        assert np.isclose(prop.merged, concentration(x, ola_hamming, prop.anchor, prop.order + 1), rtol=1e-12)
        assert np.isclose(prop.single, concentration(x, ola_hamming, prop.candidate, 0), rtol=1e-12)
        assert prop.accepted == (prop.merged > max(prop.piece, prop.single) * (1 + 1e-12))
    assert set(result.scores) == set(result.partition.pieces)
    assert validate_partition(result.partition) is None
    assert max(p.r for p in result.partition.pieces) <= 3


def test_greedy_without_merging(ola_hamming, rng):
    assert greedy_adapt(rng.standard_normal(64), ola_hamming, r_max=0) == OrderedPartition.uniform(8)


def test_greedy_argument_errors(ola_hamming):
    with pytest.raises(ConfigError):
        greedy_search(np.zeros(64), ola_hamming, r_max=-1)
    with pytest.raises(ConfigError):
        greedy_search(np.zeros(64), ola_hamming, reset="sideways")


# ============================
# Dynamic programming
# ============================

def test_dominance_sets():
    g = GaborSystem(rect(8, 64), 8, 8)
    assert_array_equal(dominance_sets(g), np.arange(64) // 8)

    gapped = GaborSystem(rect(2, 8), 4, 8)
    assert_array_equal(dominance_sets(gapped), [0, 0, -1, -1, 1, 1, -1, -1])

    hamming = GaborSystem(make_window("hamming", 16, 64, periodic=True), 8, 16)
    owner = dominance_sets(hamming)
    assert np.all(owner >= 0)
    # the first translate's peak sits at its center sample 8
    assert owner[8] == 0


def test_dp_table_dominance_accessor(rng):
    g = GaborSystem(rect(8, 64), 8, 8)
    table = dp_search(rng.standard_normal(64), g).table
    assert_array_equal(table.D(3), np.arange(24, 32))


def test_solve_prefix_constant_costs():
    N = 8
    ones = {Piece(n, r): 1.0 for n in range(N) for r in range(N - n)}
    _, _, partition = solve_prefix(ones, N, N - 1)
    assert partition == OrderedPartition.merged(N)

    _, _, partition = solve_prefix(ones, N, 3)
    assert partition.pieces == (Piece(0, 3), Piece(4, 3))

    zeros = {p: 0.0 for p in ones}
    _, _, partition = solve_prefix(zeros, N, N - 1)
    assert partition == OrderedPartition.uniform(N)


def _exhaustive_check(x, g):
    N = g.N
    result = dp_search(x, g, r_max=N - 1)
    costs = result.table.segment_costs
    best = min(sum(costs[p] for p in part.pieces) for part in iter_partitions(N))
    J = result.table.J_star[N]
    assert np.isclose(J, best, rtol=1e-12, atol=1e-12)
    assert np.isclose(sum(costs[p] for p in result.partition.pieces), J, rtol=1e-12, atol=1e-12)
    assert validate_partition(result.partition) is None


def test_dp_matches_exhaustive_search(ola_hamming, rng):
    for _ in range(50):
        _exhaustive_check(rng.standard_normal(64), ola_hamming)


def test_dp_matches_exhaustive_search_at_twelve_translates(rng):
    g = GaborSystem(make_window("hamming", 16, 96), 8, 16)
    for _ in range(5):
        _exhaustive_check(rng.standard_normal(96) + 1j * rng.standard_normal(96), g)


@pytest.mark.slow
def test_dp_matches_exhaustive_search_on_fifty_signals_at_twelve_translates(rng):
    g = GaborSystem(make_window("hamming", 16, 96), 8, 16)
    for _ in range(50):
        _exhaustive_check(rng.standard_normal(96) + 1j * rng.standard_normal(96), g)


def test_dp_respects_r_max(ola_hamming, rng):
    x = rng.standard_normal(64)
    assert dp_adapt(x, ola_hamming, r_max=0) == OrderedPartition.uniform(8)
    assert max(p.r for p in dp_adapt(x, ola_hamming, r_max=2).pieces) <= 2
    with pytest.raises(ConfigError):
        dp_search(x, ola_hamming, r_max=-1)


def test_dp_custom_cost(ola_hamming, rng):
    x = rng.standard_normal(64)
    partition = dp_adapt(x, ola_hamming, cost=lambda coefs, energy: 1.0, r_max=7)
    assert partition == OrderedPartition.merged(8)
