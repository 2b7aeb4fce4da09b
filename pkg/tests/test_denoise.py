import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from supframe.errors import ComponentOverflow, ConfigError, SelectionMismatch, ZeroSignal
from supframe.experiments.denoise import (
    NoiseModel,
    add_noise,
    coefficient_noise_power,
    noise_sigma,
    snr_gain_db,
    wiener_oracle,
    wiener_two_stage,
)
from supframe.experiments.models import (
    GAIN_CEILING_DB,
    ExperimentConfig,
    MethodSpec,
    SyntheticSpec,
    Tone,
    WindowSpec,
)
from supframe.experiments.runner import enhance, longer_over_region, run_experiment, system_for
from supframe.experiments.synthetic import sustained_region, synthetic_signal
from supframe.frames.gabor import GaborSystem
from supframe.frames.superposition import (
    OrderedPartition,
    Piece,
    family,
    make_selection,
    superposition_analyze,
)
from supframe.frames.windows import make_window


def small_config(**overrides) -> ExperimentConfig:
    fields = dict(
        length=256,
        signal=SyntheticSpec(
            local_tone=Tone(amplitude=1.0, frequency=0.0937, start=32, length=128),
            impulses=[180, 220],
            bump=None,
        ),
        snr_db=[10.0],
        trials=2,
        seed=7,
        methods=[
            MethodSpec(name="fixed-16", kind="fixed", window=WindowSpec(winlen=16, hop=8)),
            MethodSpec(name="greedy", kind="greedy", window=WindowSpec(winlen=16, hop=8)),
        ],
    )
    fields.update(overrides)
    return ExperimentConfig(**fields)


# ============================
# Synthetic signal and noise
# ============================

def test_synthetic_signal_components():
    spec = SyntheticSpec(global_tone=None, local_tone=None, impulses=[3, 9], bump=None)
    x = synthetic_signal(16, spec)
    expected = np.zeros(16)
    expected[[3, 9]] = 1.0
    assert_allclose(x, expected)

    x = synthetic_signal(2048)
    assert x.shape == (2048,) and np.isrealobj(x)
    assert sustained_region(SyntheticSpec(), 2048) == range(192, 1024)


def test_synthetic_signal_overflow():
    with pytest.raises(ComponentOverflow):
        synthetic_signal(1024)
    with pytest.raises(ComponentOverflow):
        synthetic_signal(64, SyntheticSpec(local_tone=Tone(amplitude=1, frequency=0.1, start=60, length=8),
                                           impulses=[], bump=None))
    with pytest.raises(ComponentOverflow, match="outside"):
        synthetic_signal(64, SyntheticSpec(global_tone=Tone(amplitude=1, frequency=0.1, start=64),
                                           local_tone=None, impulses=[], bump=None))


def test_noise_level_follows_target_snr(rng):
    x = rng.standard_normal(512)
    snrs = []
    for seed in range(1000):
        n = add_noise(x, 10.0, seed) - x
        snrs.append(10 * math.log10(np.sum(x ** 2) / np.sum(n ** 2)))
    assert abs(math.fsum(snrs) / len(snrs) - 10.0) <= 0.1


def test_noise_is_reproducible_per_seed(rng):
    x = rng.standard_normal(64)
    assert np.array_equal(add_noise(x, 5.0, 11), add_noise(x, 5.0, 11))
    assert not np.array_equal(add_noise(x, 5.0, 11), add_noise(x, 5.0, 12))
    assert np.array_equal(add_noise(x, None, 11), x)


def test_complex_noise_keeps_variance():
    draws = NoiseModel(sigma=2.0, seed=3).sample(20000, complex_valued=True)
    assert np.iscomplexobj(draws)
    assert abs(np.mean(np.abs(draws) ** 2) / 4.0 - 1) < 0.05


def test_noise_sigma():
    x = np.ones(100)
    assert np.isclose(noise_sigma(x, 0.0), 1.0)
    assert np.isclose(noise_sigma(x, 20.0), 0.1)
    assert noise_sigma(x, None) == 0.0
    with pytest.raises(ZeroSignal):
        noise_sigma(np.zeros(8), 10.0)


# ============================
# Suppression
# ============================

def _coefficients(ola_hamming, x):
    sel = make_selection(OrderedPartition.from_orders(8, [1, 0, 3, 0]), ola_hamming, "global")
    return sel, superposition_analyze(x, ola_hamming, sel)


def test_coefficient_noise_power_matches_monte_carlo(ola_hamming):
    sel, _ = _coefficients(ola_hamming, np.zeros(64))
    nu = coefficient_noise_power(sel, ola_hamming, 0.5)
    fam = family(ola_hamming)
    for p in sel.pieces:
        assert np.isclose(nu[p], 0.25 * np.sum(fam.profile(p.r).samples ** 2))

    powers = {p: [] for p in sel.pieces}
    for seed in range(400):
        C = superposition_analyze(NoiseModel(sigma=0.5, seed=seed).sample(64), ola_hamming, sel)
        for p, c in C.entries.items():
            powers[p].append(np.mean(np.abs(c) ** 2))
    for p in sel.pieces:
        assert abs(np.mean(powers[p]) / nu[p] - 1) < 0.1


def test_wiener_oracle_gain(ola_hamming, rng):
    x = rng.standard_normal(64)
    _, X = _coefficients(ola_hamming, x)
    out = wiener_oracle(X, X, 2.0)
    for p, c in X.entries.items():
        power = np.abs(c) ** 2
        assert_allclose(out.entries[p], power / (power + 2.0) * c)
    assert wiener_oracle(X, X, 0.0).energy() == pytest.approx(X.energy())


def test_wiener_two_stage(ola_hamming, rng):
    _, Y = _coefficients(ola_hamming, rng.standard_normal(64))
    untouched = wiener_two_stage(Y, 0.0)
    for p in Y.entries:
        assert_allclose(untouched.entries[p], Y.entries[p])

    silenced = wiener_two_stage(Y, 1e9)
    assert silenced.energy() == 0.0

    nu = {p: float(i) for i, p in enumerate(Y.selection.pieces)}
    out = wiener_two_stage(Y, nu)
    for p, c in Y.entries.items():
        estimate = np.maximum(np.abs(c) ** 2 - nu[p], 0)
        gain = np.where(estimate + nu[p] > 0, estimate / np.maximum(estimate + nu[p], 1e-300), 1.0)
        assert_allclose(out.entries[p], gain * c)


def test_suppression_rejects_bad_inputs(ola_hamming, rng):
    _, Y = _coefficients(ola_hamming, rng.standard_normal(64))
    with pytest.raises(ConfigError):
        wiener_two_stage(Y, -1.0)
    other_sel = make_selection(OrderedPartition.uniform(8), ola_hamming, "global")
    other = superposition_analyze(rng.standard_normal(64), ola_hamming, other_sel)
    with pytest.raises(SelectionMismatch):
        wiener_oracle(Y, other, 1.0)


def test_snr_gain():
    x = np.zeros(4)
    y = np.array([2.0, 0, 0, 0])
    assert np.isclose(snr_gain_db(x, y, np.array([1.0, 0, 0, 0])), 20 * math.log10(2))
    assert snr_gain_db(x, y, x) == GAIN_CEILING_DB
    assert snr_gain_db(x, y, np.array([2e-20, 0, 0, 0])) == GAIN_CEILING_DB


# ============================
# Experiments
# ============================

def test_config_validation():
    with pytest.raises(ValueError):
        WindowSpec(winlen=16, hop=32)
    with pytest.raises(ValueError):
        small_config(length=250)
    with pytest.raises(ValueError):
        small_config(methods=[MethodSpec(name="a", kind="fixed"), MethodSpec(name="a", kind="dp")])
    assert WindowSpec(winlen=16, hop=8).M == 16
    assert WindowSpec(winlen=16, hop=8, modulations=32).M == 32
    assert len(ExperimentConfig().methods) == 8


def test_system_for():
    g = system_for(WindowSpec(winlen=16, hop=8, periodic=True), 64)
    assert (g.L, g.a, g.M, g.N) == (64, 8, 16, 8)
    with pytest.raises(ConfigError):
        system_for(WindowSpec(winlen=16, hop=6), 64)


def test_small_experiment_is_deterministic():
    config = small_config()
    first = run_experiment(config)
    second = run_experiment(config, threads=2)
    assert first.payload_hash == second.payload_hash
    assert len(first.payload_hash) == 64
    assert len(first.results) == 4
    for res in first.results:
        assert len(res.gains_db) == 2
        assert all(math.isfinite(v) for v in res.gains_db)
        if res.kind == "fixed":
            assert res.structure_fraction is None
            assert res.mean_pieces == 32
        else:
            assert 0.0 <= res.structure_fraction <= 1.0


def test_experiment_seed_changes_the_hash():
    assert run_experiment(small_config()).payload_hash != run_experiment(small_config(seed=8)).payload_hash


def test_oracle_beats_noise_on_a_clean_tone():
    config = small_config(rules=["oracle"], snr_db=[0.0])
    for res in run_experiment(config).results:
        assert res.mean_gain_db > 0


def test_experiment_rejects_wrong_length_signal():
    with pytest.raises(ConfigError):
        run_experiment(small_config(), x=np.ones(100))


def test_longer_over_region():
    g = GaborSystem(make_window("hamming", 16, 64, periodic=True), 8, 16)
    merged_tone = OrderedPartition(8, (Piece(0, 3), Piece(4, 0), Piece(5, 0), Piece(6, 0), Piece(7, 0)))
    assert longer_over_region(merged_tone, g, range(8, 24), [50])
    assert not longer_over_region(OrderedPartition.uniform(8), g, range(8, 24), [50])


def test_enhance(rng):
    x = synthetic_signal(256, small_config().signal)
    y = add_noise(x, 10.0, 1)
    method = MethodSpec(name="greedy", kind="greedy", window=WindowSpec(winlen=16, hop=8))
    out = enhance(y, method, "oracle", x_clean=x)
    assert out.x_hat.shape == (256,) and np.isrealobj(out.x_hat)
    assert out.gain_db > 0
    assert np.isclose(out.sigma, np.sqrt(np.mean((y - x) ** 2)))

    blind = enhance(y, method, "two-stage", sigma=out.sigma)
    assert blind.gain_db is None
    with pytest.raises(ConfigError):
        enhance(y, method, "oracle")
    with pytest.raises(ConfigError):
        enhance(y, method, "two-stage")


@pytest.mark.slow
def test_default_experiment_shape():
    report = run_experiment(ExperimentConfig(rules=["oracle"]), threads=4)
    by_method = {res.method: res for res in report.results}
    for res in report.results:
        assert 0.05 <= res.std_gain_db <= 0.5
    worst_fixed = min(res.mean_gain_db for res in report.results if res.kind == "fixed")
    adaptive = max(by_method["greedy"].mean_gain_db, by_method["dp"].mean_gain_db)
    assert adaptive > worst_fixed
    best_fixed = max(res.mean_gain_db for res in report.results if res.kind == "fixed")
    for name in ("greedy", "dp"):
        assert by_method[name].structure_fraction >= 0.9
        assert abs(by_method[name].mean_gain_db - best_fixed) <= 1.0
