import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from helpers import rect, rel_err
from supframe.errors import (
    ModulationTooCoarse,
    NeighborOverlapViolated,
    NotPowerOfTwo,
    OlaViolated,
    SelectionMismatch,
)
from supframe.frames.counting import OpCounter, fft_multiplies
from supframe.frames.gabor import GaborSystem, stft_analyze
from supframe.frames.reconstruct import (
    DualOrigin,
    canonical_dual,
    count_multiplies,
    dual_reconstruct,
    dyadic_duals,
    gola_reconstruct,
    lapped_duals,
    lapped_sets,
    neighbor_overlap_check,
    ola_check,
    ola_reconstruct,
)
from supframe.frames.signal import translate
from supframe.frames.superposition import (
    Mode,
    OrderedPartition,
    SelectionFunction,
    family,
    make_selection,
    random_dyadic_partition,
    random_partition,
    superposition_analyze,
)
from supframe.frames.windows import make_window


def ola_systems(L):
    return [
        GaborSystem(rect(8, L), 8, 8),
        GaborSystem(make_window("triangular", 16, L), 8, 16),
        GaborSystem(make_window("hamming", 16, L, periodic=True), 8, 16),
    ]


# ============================
# Overlap-add
# ============================

def test_ola_certificates():
    cert = ola_check(make_window("hamming", 16, 64, periodic=True), 8)
    assert cert.holds and cert.spectral_nulls_ok
    assert np.isclose(cert.constant, 1.08)

    cert = ola_check(make_window("triangular", 16, 64), 8)
    assert cert.holds and np.isclose(cert.constant, 1.0)

    cert = ola_check(make_window("hamming", 16, 64), 8)
    assert not cert.holds
    assert cert.deviation > 1e-3


def test_ola_round_trip(ola_hamming, rng):
    x = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    assert rel_err(ola_reconstruct(stft_analyze(x, ola_hamming), ola_hamming), x) <= 1e-12


def test_ola_requires_the_constraint(rng):
    g = GaborSystem(make_window("hamming", 16, 64), 8, 16)
    with pytest.raises(OlaViolated, match="overlap-add"):
        ola_reconstruct(stft_analyze(rng.standard_normal(64), g), g)


def test_ola_requires_enough_modulates(rng):
    g = GaborSystem(make_window("hamming", 16, 64, periodic=True), 8, 8)
    with pytest.raises(ModulationTooCoarse):
        ola_reconstruct(stft_analyze(rng.standard_normal(64), g), g)


@pytest.mark.parametrize("L", [64, 256, 1024])
def test_round_trip_on_random_partitions(rng, L):
    for g in ola_systems(L):
        x = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        for i in range(50):
            mode = "local" if i % 2 else "global"
            sel = make_selection(random_partition(g.N, rng, max_order=6, wrap=bool(i % 3)), g, mode)
            C = superposition_analyze(x, g, sel)
            assert rel_err(gola_reconstruct(C, g), x) <= 1e-10
            assert rel_err(dual_reconstruct(C, canonical_dual(sel, g)), x) <= 1e-10


def test_dual_round_trip_without_overlap_add(rng):
    g = GaborSystem(make_window("hamming", 20, 120), 6, 12)
    x = rng.standard_normal(120)
    sel = make_selection(random_partition(g.N, rng, max_order=5, wrap=True), g, "local")
    C = superposition_analyze(x, g, sel)
    assert rel_err(dual_reconstruct(C, canonical_dual(sel, g)), x) <= 1e-10
    with pytest.raises(OlaViolated):
        gola_reconstruct(C, g)


def test_gola_needs_enough_modulates(ola_hamming, rng):
    p = OrderedPartition.uniform(8)
    sel = SelectionFunction(p, Mode.GLOBAL, {piece: 8 for piece in p.pieces})
    C = superposition_analyze(rng.standard_normal(64), ola_hamming, sel)
    with pytest.raises(ModulationTooCoarse):
        gola_reconstruct(C, ola_hamming)


def test_dual_frame_must_match_coefficients(ola_hamming, rng):
    x = rng.standard_normal(64)
    sel = make_selection(OrderedPartition.uniform(8), ola_hamming, "global")
    other = make_selection(OrderedPartition.merged(8), ola_hamming, "global")
    with pytest.raises(SelectionMismatch):
        dual_reconstruct(superposition_analyze(x, ola_hamming, sel), canonical_dual(other, ola_hamming))


def test_canonical_dual_inverts_the_diagonal(triangular, rng):
    sel = make_selection(random_partition(8, rng, max_order=3, wrap=True), triangular, "local")
    D = canonical_dual(sel, triangular)
    assert D.origin is DualOrigin.CANONICAL
    fam = family(triangular)
    total = np.zeros(64)
    for p in sel.pieces:
        element = translate(fam.profile(p.r).samples, p.n * triangular.a)
        total += sel.mod_counts[p] * D.window(p) * element
    assert_allclose(total, 1.0, atol=1e-12)


# ============================
# Pre-computed duals
# ============================

def test_neighbor_overlap():
    w = make_window("hamming", 16, 64, periodic=True)
    assert neighbor_overlap_check(w, 8)
    assert not neighbor_overlap_check(w, 4)
    assert neighbor_overlap_check(rect(8, 64), 8)


def test_lapped_sets_split_the_merged_support():
    w = make_window("triangular", 16, 64)
    sets = lapped_sets(w, 8, 2)
    assert_allclose(sets.left, np.arange(0, 8))
    assert_allclose(sets.right, np.arange(24, 32))
    assert_allclose(sets.center, np.arange(8, 24))

    whole = lapped_sets(w, 8, 7)
    assert whole.left.size == whole.right.size == 0
    assert whole.center.size == 64


def test_lapped_duals_center_is_flat(ola_hamming):
    D = lapped_duals(ola_hamming.window, 8, 32)
    assert set(D.profiles) == {0, 1, 2}
    assert_allclose(D[2][8:24], 1 / (32 * 1.08))
    assert 3 not in D


def test_precomputed_duals_agree_with_canonical(rng):
    for g in ola_systems(64)[1:]:
        for _ in range(20):
            sel = make_selection(random_dyadic_partition(g.N, rng, max_order=3), g, "dyadic")
            canonical = canonical_dual(sel, g)
            lapped = lapped_duals(g.window, g.a, sel.M_g).restrict(sel, g)
            dyadic = dyadic_duals(g.window, g.a, sel.M_g).restrict(sel, g)
            for p in sel.pieces:
                assert_allclose(lapped.window(p), canonical.window(p), atol=1e-12)
                assert_allclose(dyadic.window(p), canonical.window(p), atol=1e-12)


def test_precomputed_duals_rescale_across_modulation_counts(ola_hamming, rng):
    w = ola_hamming.window
    x = rng.standard_normal(64)
    for _ in range(10):
        sel = make_selection(random_dyadic_partition(8, rng, max_order=3), ola_hamming, "dyadic")
        wide = SelectionFunction(sel.partition, Mode.DYADIC, {p: 64 for p in sel.pieces})
        for make in (lapped_duals, dyadic_duals):
            # profiles built for one M_g serve a selection with the other
            for built, target in ((64, sel), (sel.M_g, wide)):
                D = make(w, 8, built).restrict(target, ola_hamming)
                canonical = canonical_dual(target, ola_hamming)
                for p in target.pieces:
                    assert_allclose(D.window(p), canonical.window(p), atol=1e-12)
                C = superposition_analyze(x, ola_hamming, target)
                assert rel_err(dual_reconstruct(C, D), x) <= 1e-10


def test_lapped_duals_reconstruct_global_selections(ola_hamming, rng):
    x = rng.standard_normal(64)
    for _ in range(20):
        sel = make_selection(random_partition(8, rng, max_order=3, wrap=True), ola_hamming, "global")
        D = lapped_duals(ola_hamming.window, 8, sel.M_g).restrict(sel, ola_hamming)
        assert D.origin is DualOrigin.LAPPED
        C = superposition_analyze(x, ola_hamming, sel)
        assert rel_err(dual_reconstruct(C, D), x) <= 1e-10


def test_dyadic_duals_without_overlap_add(rng):
    g = GaborSystem(make_window("hamming", 16, 128), 8, 16)
    x = rng.standard_normal(128)
    for _ in range(10):
        sel = make_selection(random_dyadic_partition(16, rng, max_order=3), g, "dyadic")
        D = dyadic_duals(g.window, 8, sel.M_g).restrict(sel, g)
        C = superposition_analyze(x, g, sel)
        assert rel_err(dual_reconstruct(C, D), x) <= 1e-10


def test_precomputed_dual_preconditions(rng):
    w = make_window("hamming", 16, 64, periodic=True)
    with pytest.raises(NeighborOverlapViolated, match="neighbor-overlap violated"):
        dyadic_duals(w, 4, 16)
    with pytest.raises(NotPowerOfTwo):
        dyadic_duals(make_window("hamming", 16, 48, periodic=True), 8, 16)
    with pytest.raises(OlaViolated):
        lapped_duals(make_window("hamming", 16, 64), 8, 16)

    g = GaborSystem(w, 8, 16)
    local = make_selection(OrderedPartition.from_orders(8, [1, 0, 3, 0]), g, "local")
    with pytest.raises(SelectionMismatch):
        lapped_duals(w, 8, local.M_g).restrict(local, g)
    glob = make_selection(OrderedPartition.from_orders(8, [1, 0, 3, 0]), g, "global")
    with pytest.raises(SelectionMismatch):
        dyadic_duals(w, 8, glob.M_g).restrict(glob, g)
    short = SelectionFunction(glob.partition, Mode.GLOBAL, {p: 16 for p in glob.pieces})
    with pytest.raises(SelectionMismatch, match="longer than M_g=16"):
        lapped_duals(w, 8, glob.M_g).restrict(short, g)


# ============================
# Operation counts
# ============================

def test_count_multiplies_closed_forms():
    g = GaborSystem(make_window("hamming", 64, 1024, periodic=True), 32, 64)
    assert count_multiplies("analysis", None, g) == 32 * 64 * 7
    assert count_multiplies("ola", None, g) == 32 * 64 * 6
    sel = make_selection(OrderedPartition.from_orders(32, [3] * 8), g, "global")
    M_g = sel.M_g
    assert count_multiplies("canonical_dual", sel, g) == math.ceil(8 * M_g * (3 + math.log2(M_g)) - 1e-9)


def test_counters_follow_closed_forms(rng):
    g = GaborSystem(make_window("hamming", 64, 2048, periodic=True), 32, 64)
    x = rng.standard_normal(2048)
    counter = OpCounter()
    X = stft_analyze(x, g, counter)
    assert counter.by_stage["fft"] == g.N * fft_multiplies(64)
    assert counter.by_stage["window"] == g.N * 64
    assert 0.25 <= counter.multiplies / count_multiplies("analysis", None, g) <= 2

    counter = OpCounter()
    ola_reconstruct(X, g, counter)
    assert 0.25 <= counter.multiplies / count_multiplies("ola", None, g) <= 2

    sel = make_selection(random_partition(g.N, rng, max_order=7), g, "global")
    C = superposition_analyze(x, g, sel)
    counter = OpCounter()
    dual_reconstruct(C, canonical_dual(sel, g, counter), counter)
    assert 0.25 <= counter.multiplies / count_multiplies("canonical_dual", sel, g) <= 2
