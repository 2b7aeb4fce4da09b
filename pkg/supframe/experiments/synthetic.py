import logging
from typing import Optional

import numpy as np

from supframe.errors import ComponentOverflow
from supframe.experiments.models import Bump, SyntheticSpec, Tone

logger = logging.getLogger(__name__)


def _tone(L: int, tone: Tone) -> np.ndarray:
    if tone.start >= L:
        raise ComponentOverflow(f"tone starts at {tone.start}, outside [0, {L})")
    length = L - tone.start if tone.length is None else tone.length
    if tone.start + length > L:
        raise ComponentOverflow(f"tone [{tone.start}, {tone.start + length}) exceeds L={L}")
    out = np.zeros(L)
    t = np.arange(tone.start, tone.start + length)
    out[t] = tone.amplitude * np.cos(2 * np.pi * tone.frequency * t + tone.phase)
    return out


def _bump(L: int, bump: Bump) -> np.ndarray:
    """Compactly supported C-infinity bump exp(1 - 1/(1 - u^2)) on |u| < 1."""
    half = bump.width / 2
    lo, hi = bump.center - half, bump.center + half
    if lo < 0 or hi > L:
        raise ComponentOverflow(f"bump [{lo:g}, {hi:g}) exceeds L={L}")
    u = (np.arange(L) - bump.center) / half
    out = np.zeros(L)
    inside = np.abs(u) < 1
    out[inside] = bump.amplitude * np.exp(1 - 1 / (1 - u[inside] ** 2))
    return out


def synthetic_signal(L: int, spec: Optional[SyntheticSpec] = None) -> np.ndarray:
    """Global tone + time-limited tone + two impulses + bump, all real."""
    spec = spec or SyntheticSpec()
    x = np.zeros(L)
    if spec.global_tone is not None:
        x += _tone(L, spec.global_tone)
    if spec.local_tone is not None:
        x += _tone(L, spec.local_tone)
    for t in spec.impulses:
        if not 0 <= t < L:
            raise ComponentOverflow(f"impulse at {t} outside [0, {L})")
        x[t] += spec.impulse_amplitude
    if spec.bump is not None:
        x += _bump(L, spec.bump)
    return x


def sustained_region(spec: SyntheticSpec, L: int) -> Optional[range]:
    tone = spec.local_tone
    if tone is None:
        return None
    length = L - tone.start if tone.length is None else tone.length
    return range(tone.start, tone.start + length)
