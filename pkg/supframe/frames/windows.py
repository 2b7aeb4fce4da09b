from typing import Literal

import numpy as np
from scipy.signal import get_window

from supframe.errors import ConfigError
from supframe.frames.signal import Window

WindowName = Literal["hamming", "hann", "triangular", "rect"]

_SCIPY_NAMES = {
    "hamming": "hamming",
    "hann": "hann",
    "triangular": "triang",
    "rect": "boxcar",
}


def make_window(name: str, winlen: int, L: int, periodic: bool = False) -> Window:
    """A named window of ``winlen`` samples placed at the origin of Z_L.

    Symmetric profiles by default; ``periodic=True`` gives the DFT-even
    variants that satisfy constant overlap-add at 50% hop.
    """
    if name not in _SCIPY_NAMES:
        raise ConfigError(f"unknown window {name!r}; expected one of {sorted(_SCIPY_NAMES)}")
    if not 1 <= winlen <= L:
        raise ConfigError(f"window length {winlen} must lie in [1, {L}]")
    profile = get_window(_SCIPY_NAMES[name], winlen, fftbins=periodic)
    samples = np.zeros(L)
    samples[:winlen] = np.clip(profile, 0.0, None)
    return Window(samples)
