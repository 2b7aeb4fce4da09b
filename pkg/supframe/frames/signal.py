"""
Cyclic-group primitives on Z_L: windows, translation, modulation, DFT and
window support/length.

Signals are plain one-dimensional numpy arrays; all indexing is modulo their
length L. Windows are real, nonnegative and immutable, and cache their
support information.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Tuple, TypeVar, Union

import numpy as np
from scipy import fft as sp_fft

from supframe.errors import AllZeroWindow, ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SupportInfo:
    """Support of a window and its cyclic length.

    ``start`` is the first index of the shortest cyclic arc holding the whole
    support, so the window lives on ``(start + j) mod L`` for
    ``j in range(length)``.
    """

    support: np.ndarray
    length: int
    start: int

    @property
    def contiguous(self) -> bool:
        return len(self.support) == self.length


@dataclass(frozen=True, eq=False)
class Window:
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.array(self.samples, dtype=float).ravel()
        if w.size == 0:
            raise ConfigError("window must have at least one sample")
        if not np.all(np.isfinite(w)):
            raise ConfigError("window samples must be finite")
        if np.any(w < 0):
            raise ConfigError("window samples must be nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "samples", w)

    @property
    def L(self) -> int:
        return self.samples.size

    @property
    def dc_gain(self) -> float:
        """The DFT of the samples at frequency zero."""
        return float(self.samples.sum())

    @cached_property
    def info(self) -> SupportInfo:
        return window_length(self)

    @property
    def length(self) -> int:
        return self.info.length

    @cached_property
    def arc_values(self) -> np.ndarray:
        """Samples along the support arc, starting at ``info.start``."""
        info = self.info
        vals = self.samples[(info.start + np.arange(info.length)) % self.L]
        vals.setflags(write=False)
        return vals

    def arc(self, shift: int = 0) -> Tuple[np.ndarray, np.ndarray]:
        """Positions and unwrapped clock of the window translated by ``shift``.

        The clock runs ``shift + start + j`` along the arc; the position is the
        clock reduced modulo L.
        """
        info = self.info
        clock = shift + info.start + np.arange(info.length, dtype=np.int64)
        return clock % self.L, clock

    def energy(self) -> float:
        return float(np.dot(self.samples, self.samples))

    def __len__(self) -> int:
        return self.L

    def __eq__(self, other):
        if not isinstance(other, Window):
            return NotImplemented
        return np.array_equal(self.samples, other.samples)

    __hash__ = None


Shiftable = TypeVar("Shiftable", Window, np.ndarray)


def as_signal(x) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 1 or x.size == 0:
        raise ConfigError("a signal must be a non-empty one-dimensional array")
    return x.astype(complex, copy=False)


def translate(x: Shiftable, shift: int) -> Shiftable:
    """output[t] = input[t - shift mod L]."""
    if isinstance(x, Window):
        return Window(np.roll(x.samples, int(shift) % x.L))
    x = np.asarray(x)
    return np.roll(x, int(shift) % x.size)


def modulate(x, m: int, M: int) -> np.ndarray:
    """output[t] = input[t] * exp(2 pi i m t / M).

    M = L/b is the modulation count of record; the phase index is reduced
    modulo M in integer arithmetic before the exponential.
    """
    x = np.asarray(x.samples if isinstance(x, Window) else x)
    t = np.arange(x.size, dtype=np.int64)
    phase = (int(m) * t) % int(M)
    return x * np.exp(2j * np.pi * phase / M)


def window_length(w: Union[Window, np.ndarray]) -> SupportInfo:
    """Support set and cyclic length of a window.

    For a contiguous support the length is its cardinality. Otherwise it is
    the tightest span of the support over all cyclic shifts, which equals L
    minus the largest run of zeros between consecutive support points.
    """
    samples = w.samples if isinstance(w, Window) else np.asarray(w)
    L = samples.size
    support = np.flatnonzero(samples)
    if support.size == 0:
        raise AllZeroWindow()

    gaps = np.diff(support, append=support[0] + L) - 1
    # the wrap-around gap is last; prefer it on ties so unwrapped windows start at their first sample
    widest = gaps.size - 1 - int(np.argmax(gaps[::-1]))
    start = int(support[(widest + 1) % support.size])
    length = int(L - gaps[widest])
    return SupportInfo(support=support, length=length, start=start)


def dft(x) -> np.ndarray:
    return sp_fft.fft(np.asarray(x))


def inverse_dft(X) -> np.ndarray:
    """Inverse DFT carrying the 1/M factor."""
    return sp_fft.ifft(np.asarray(X))


def dft_support(w: Window, rtol: float = 1e-12) -> np.ndarray:
    """Indices where the window's DFT does not vanish relative to its peak."""
    spectrum = np.abs(dft(w.samples))
    return np.flatnonzero(spectrum > rtol * spectrum.max())
