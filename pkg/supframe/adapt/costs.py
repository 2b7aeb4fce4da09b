"""Scores that drive partition selection."""

from typing import Callable, Dict, Optional

import numpy as np

from supframe.frames.counting import OpCounter
from supframe.frames.gabor import GaborSystem, analyze_translates
from supframe.frames.superposition import family

# cost(coefficients, whole-signal energy) -> additive segment cost
SegmentCost = Callable[[np.ndarray, float], float]


def piece_coefficients(x: np.ndarray, g: GaborSystem, n: int, r: int, counter: Optional[OpCounter] = None) -> np.ndarray:
    """Coefficients of T_{na}w_r at its local modulation count max(len(w_r), M)."""
    profile = family(g).profile(r)
    M_r = max(profile.length, g.M)
    return analyze_translates(x, profile, [n * g.a], M_r, counter)[0]


def concentration_score(coefs: np.ndarray) -> float:
    """sum |c|^4 / (sum |c|^2)^2, and 0 for an all-zero vector."""
    power = np.abs(coefs) ** 2
    energy = power.sum()
    if energy == 0:
        return 0.0
    return float(np.dot(power, power) / energy ** 2)


def concentration(x, g: GaborSystem, n: int, r: int) -> float:
    """Time-frequency concentration of x seen through T_{na}w_r."""
    return concentration_score(piece_coefficients(np.asarray(x, dtype=complex), g, n, r))


def entropy_cost(coefs: np.ndarray, total_energy: Optional[float] = None) -> float:
    """-sum v log v with v = |c|^2 / E.

    E defaults to the energy of ``coefs``; pass the whole-signal energy to get
    costs that add up across pieces.
    """
    power = np.abs(np.asarray(coefs)) ** 2
    energy = float(power.sum()) if total_energy is None else float(total_energy)
    if energy <= 0:
        return 0.0
    v = power[power > 0] / energy
    return float(-np.sum(v * np.log(v)))


SEGMENT_COSTS: Dict[str, SegmentCost] = {
    "entropy": entropy_cost,
}
