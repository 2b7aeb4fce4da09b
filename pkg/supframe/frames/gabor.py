"""
Gabor systems G(w, a, b) on C^L.

Element (m, n) is the window translated by n*a and modulated on the window's
own clock: on the arc of T_{na}w its value at clock c is
w * exp(2 pi i m c / M). This is M_{mb}T_{na}w whenever M divides L or the arc
does not cross the period boundary, and it keeps the frame operator exactly
diagonal whenever M >= len(w).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy import fft as sp_fft
from scipy.linalg import eigvalsh
from scipy.sparse.linalg import eigsh

from supframe.errors import ConfigError, NotAFrame, RefinementTooCoarse
from supframe.frames.counting import OpCounter, charge, charge_fft
from supframe.frames.signal import Window, as_signal

logger = logging.getLogger(__name__)

RANK_RTOL = 1e-9
COVER_RTOL = 1e-12
DENSE_EIG_LIMIT = 4096


@dataclass(frozen=True, eq=False)
class GaborSystem:
    window: Window
    a: int
    M: int

    def __post_init__(self):
        L = self.window.L
        if self.a <= 0 or L % self.a:
            raise ConfigError(f"time step a={self.a} must be a positive divisor of L={L}")
        if self.M <= 0:
            raise ConfigError(f"modulation count M={self.M} must be positive")

    @classmethod
    def from_steps(cls, window: Window, a: int, b) -> "GaborSystem":
        M = Fraction(window.L) / Fraction(b)
        if M.denominator != 1:
            raise ConfigError(f"frequency step b={b} does not give an integer modulation count")
        return cls(window, a, int(M))

    @property
    def L(self) -> int:
        return self.window.L

    @property
    def N(self) -> int:
        return self.L // self.a

    @property
    def b(self) -> Fraction:
        return Fraction(self.L, self.M)


@dataclass(frozen=True)
class FrameBounds:
    A: float
    B: float

    @property
    def tight(self) -> bool:
        return bool(np.isclose(self.A, self.B, rtol=1e-12, atol=0.0))


@dataclass(frozen=True, eq=False)
class FrameOperator:
    """Frame operator in diagonal (length-L) or dense (L x L) form."""

    diagonal: Optional[np.ndarray] = None
    dense: Optional[np.ndarray] = None

    @property
    def is_diagonal(self) -> bool:
        return self.diagonal is not None

    @property
    def L(self) -> int:
        return self.diagonal.size if self.is_diagonal else self.dense.shape[0]

    def diag(self) -> np.ndarray:
        return self.diagonal if self.is_diagonal else np.real(np.diag(self.dense))

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diagonal) if self.is_diagonal else self.dense


# ============================
# Shared kernels
# ============================

def analyze_translates(
    x: np.ndarray,
    window: Window,
    shifts: Sequence[int],
    M: int,
    counter: Optional[OpCounter] = None,
) -> np.ndarray:
    """Coefficients of ``x`` against every modulate of ``window`` at each shift.

    Returns a (len(shifts), M) array. Each windowed segment is folded onto
    Z_M along the window's clock and transformed with one length-M DFT, so the
    result is exact for any M, including M < len(window).
    """
    shifts = np.asarray(shifts, dtype=np.int64)
    K = shifts.size
    info = window.info
    clock = shifts[:, None] + info.start + np.arange(info.length, dtype=np.int64)[None, :]
    segments = x[clock % window.L] * window.arc_values[None, :]
    charge(counter, "window", segments.size)

    bins = clock % M
    if info.length <= M:
        folded = np.zeros((K, M), dtype=complex)
        np.put_along_axis(folded, bins, segments, axis=1)
    else:
        flat = (np.arange(K, dtype=np.int64)[:, None] * M + bins).ravel()
        folded = (
            np.bincount(flat, weights=segments.real.ravel(), minlength=K * M)
            + 1j * np.bincount(flat, weights=segments.imag.ravel(), minlength=K * M)
        ).reshape(K, M)
    charge_fft(counter, M, K)
    return sp_fft.fft(folded, axis=1)


def translate_energy(window: Window, a: int) -> np.ndarray:
    """sum_n |w[t - n a]|^2 for every t."""
    L = window.L
    per_phase = (window.samples ** 2).reshape(L // a, a).sum(axis=0)
    return np.tile(per_phase, L // a)


def elements(window: Window, shifts: Sequence[int], M: int) -> np.ndarray:
    """Dense matrix of all modulates of the translated window, one per row."""
    L = window.L
    rows = []
    for shift in shifts:
        pos, clock = window.arc(int(shift))
        for m in range(M):
            phi = np.zeros(L, dtype=complex)
            phi[pos] = window.arc_values * np.exp(2j * np.pi * ((m * clock) % M) / M)
            rows.append(phi)
    return np.array(rows).reshape(-1, L)


# ============================
# Operations
# ============================

def stft_analyze(x, g: GaborSystem, counter: Optional[OpCounter] = None) -> np.ndarray:
    """X[m, n] = <x, M_{mb} T_{na} w>, an (M, N) matrix."""
    x = as_signal(x)
    if x.size != g.L:
        raise ConfigError(f"signal length {x.size} does not match L={g.L}")
    shifts = np.arange(g.N) * g.a
    return analyze_translates(x, g.window, shifts, g.M, counter).T


def gabor_elements(g: GaborSystem) -> np.ndarray:
    return elements(g.window, np.arange(g.N) * g.a, g.M)


def frame_operator(g: GaborSystem) -> FrameOperator:
    """Walnut form of the frame operator.

    Diagonal with entries M * sum_n |w[t - na]|^2 when M >= len(w); otherwise
    the dense banded matrix coupling samples whose clocks agree modulo M.
    """
    if g.M >= g.window.length:
        return FrameOperator(diagonal=g.M * translate_energy(g.window, g.a))

    logger.debug("dense Walnut build: M=%d < len(w)=%d", g.M, g.window.length)
    S = np.zeros((g.L, g.L))
    vals = g.window.arc_values
    for n in range(g.N):
        pos, clock = g.window.arc(n * g.a)
        aliased = (clock[:, None] - clock[None, :]) % g.M == 0
        S[np.ix_(pos, pos)] += g.M * np.outer(vals, vals) * aliased
    return FrameOperator(dense=S)


def frame_bounds(S: FrameOperator) -> FrameBounds:
    """Optimal frame bounds: extreme eigenvalues of S."""
    if S.is_diagonal:
        lower, upper = float(S.diagonal.min()), float(S.diagonal.max())
    elif S.L <= DENSE_EIG_LIMIT:
        eig = eigvalsh(S.dense)
        lower, upper = float(eig[0]), float(eig[-1])
    else:
        upper = float(eigsh(S.dense, k=1, which="LA", return_eigenvectors=False)[0])
        lower = float(eigsh(S.dense, k=1, which="SA", return_eigenvectors=False)[0])

    if upper <= 0 or lower <= RANK_RTOL * upper:
        raise NotAFrame(lower, upper)
    return FrameBounds(A=lower, B=upper)


def covering_condition(w: Window, a: int) -> bool:
    if w.L % a:
        raise ConfigError(f"time step a={a} must divide L={w.L}")
    cover = translate_energy(w, a)
    return bool(np.all(cover > COVER_RTOL * cover.max()))


def refine_lattice(g: GaborSystem, M_prime: int) -> GaborSystem:
    """The same window and time step at modulation count M_prime >= len(w).

    Its frame operator is diagonal and equals (M'/M) times the diagonal of
    the original operator.
    """
    if M_prime < g.window.length:
        raise RefinementTooCoarse(
            f"refined modulation count {M_prime} is below len(w)={g.window.length}"
        )
    if not covering_condition(g.window, g.a):
        cover = translate_energy(g.window, g.a)
        raise NotAFrame(float(cover.min()), float(cover.max()))
    return GaborSystem(g.window, g.a, M_prime)
