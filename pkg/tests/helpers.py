import numpy as np

from supframe.frames.signal import Window


def rect(width: int, L: int, start: int = 0) -> Window:
    w = np.zeros(L)
    w[(start + np.arange(width)) % L] = 1.0
    return Window(w)


def rel_err(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / np.linalg.norm(b))
