"""
Coefficient-domain Wiener suppression and SNR scoring.

For white noise of variance sigma^2 the expected power of any coefficient of
T_{na}w_r is sigma^2 * sum_t w_r[t]^2, flat across modulates; that is the
per-piece noise power used by both suppression rules.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Union

import numpy as np

from supframe.errors import ConfigError, ZeroSignal
from supframe.experiments.models import GAIN_CEILING_DB, NOISE_GENERATOR
from supframe.frames.gabor import GaborSystem
from supframe.frames.superposition import CoefficientSet, Piece, SelectionFunction, family

logger = logging.getLogger(__name__)

NoisePower = Union[float, Mapping[Piece, float]]


@dataclass(frozen=True)
class NoiseModel:
    sigma: float
    seed: int
    kind: str = "white-gaussian"
    generator: str = NOISE_GENERATOR

    def sample(self, L: int, complex_valued: bool = False) -> np.ndarray:
        rng = np.random.Generator(np.random.PCG64(self.seed))
        if not complex_valued:
            return self.sigma * rng.standard_normal(L)
        draws = rng.standard_normal((2, L))
        return self.sigma / math.sqrt(2) * (draws[0] + 1j * draws[1])


def noise_sigma(x: np.ndarray, snr_db: Optional[float]) -> float:
    """sigma with sigma^2 = ||x||^2 / (L 10^(snr/10)); 0 for a noiseless target."""
    energy = float(np.vdot(x, x).real)
    if energy == 0:
        raise ZeroSignal()
    if snr_db is None or math.isinf(snr_db):
        return 0.0
    return math.sqrt(energy / (x.size * 10 ** (snr_db / 10)))


def add_noise(x, snr_db: Optional[float], seed: int) -> np.ndarray:
    x = np.asarray(x)
    model = NoiseModel(sigma=noise_sigma(x, snr_db), seed=seed)
    if model.sigma == 0:
        return x.copy()
    return x + model.sample(x.size, np.iscomplexobj(x))


def coefficient_noise_power(sel: SelectionFunction, g: GaborSystem, sigma: float) -> Dict[Piece, float]:
    fam = family(g)
    return {p: sigma ** 2 * fam.profile(p.r).energy() for p in sel.pieces}


def _per_piece(noise_psd: NoisePower, piece: Piece) -> float:
    nu = noise_psd[piece] if isinstance(noise_psd, Mapping) else noise_psd
    if nu < 0:
        raise ConfigError(f"noise power must be nonnegative, got {nu}")
    return float(nu)


def _gain(signal_power: np.ndarray, nu: float) -> np.ndarray:
    denom = signal_power + nu
    return np.divide(signal_power, denom, out=np.ones_like(signal_power), where=denom > 0)


def wiener_oracle(Y: CoefficientSet, X_clean: CoefficientSet, noise_psd: NoisePower) -> CoefficientSet:
    """H = |X|^2 / (|X|^2 + nu) with the clean coefficients known."""
    Y.check_matches(X_clean)
    return Y.map(
        lambda p, c: _gain(np.abs(X_clean.entries[p]) ** 2, _per_piece(noise_psd, p)) * c
    )


def wiener_two_stage(Y: CoefficientSet, noise_psd: NoisePower) -> CoefficientSet:
    """Spectral subtraction max(|Y|^2 - nu, 0) as the signal estimate, then the Wiener gain."""

    def suppress(p: Piece, c: np.ndarray) -> np.ndarray:
        nu = _per_piece(noise_psd, p)
        estimate = np.maximum(np.abs(c) ** 2 - nu, 0.0)
        return _gain(estimate, nu) * c

    return Y.map(suppress)


def snr_gain_db(x: np.ndarray, y: np.ndarray, x_hat: np.ndarray) -> float:
    """20 log10(||y - x|| / ||x_hat - x||), capped at the gain ceiling."""
    noise = float(np.linalg.norm(y - x))
    residual = float(np.linalg.norm(x_hat - x))
    if noise == 0 or residual == 0:
        return GAIN_CEILING_DB
    gain = 20 * math.log10(noise / residual)
    if gain > GAIN_CEILING_DB:
        logger.warning("SNR gain %.1f dB clipped to %.0f dB", gain, GAIN_CEILING_DB)
        return GAIN_CEILING_DB
    return gain
