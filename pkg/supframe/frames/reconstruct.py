"""
Fast synthesis for Gabor and superposition frames.

Four paths, all FFT based:

* overlap-add (plain and generalized) for windows satisfying constant
  overlap-add;
* canonical duals from the diagonal frame operator;
* lapped duals, computed once per window and valid for every global
  partition under the neighbor-overlap condition;
* dyadic duals, computed per dyadic level from that level's own Gabor frame.

Overlap-add reductions run in ascending translate order so results are
reproducible bit for bit.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import fft as sp_fft

from supframe.errors import (
    ConfigError,
    ModulationTooCoarse,
    NeighborOverlapViolated,
    NotPowerOfTwo,
    OlaViolated,
    SelectionMismatch,
)
from supframe.frames.counting import OpCounter, charge, charge_fft
from supframe.frames.gabor import GaborSystem, translate_energy
from supframe.frames.signal import Window, dft
from supframe.frames.superposition import (
    CoefficientSet,
    Mode,
    Piece,
    SelectionFunction,
    SuperpositionFamily,
    family,
    is_power_of_two,
    superposition_frame_operator,
)

logger = logging.getLogger(__name__)

OLA_RTOL = 1e-10
NULL_RTOL = 1e-10


# ============================
# Overlap-add
# ============================

@dataclass(frozen=True)
class OlaCertificate:
    holds: bool
    constant: float
    spectral_nulls_ok: bool
    deviation: float


def ola_check(w: Window, a: int) -> OlaCertificate:
    """Constant overlap-add test in time (translate sums) and frequency (DFT nulls at kN)."""
    L = w.L
    if L % a:
        raise ConfigError(f"time step a={a} must divide L={L}")
    N = L // a
    constant = w.dc_gain / a
    sums = w.samples.reshape(N, a).sum(axis=0)
    deviation = float(np.abs(sums - constant).max())
    holds = constant > 0 and deviation <= OLA_RTOL * constant

    spectrum = np.abs(dft(w.samples))
    nulls = spectrum[np.arange(1, a) * N]
    spectral_ok = constant > 0 and bool(np.all(nulls <= NULL_RTOL * spectrum.max()))
    if holds != spectral_ok:
        logger.warning(
            "overlap-add tests disagree (time deviation %.3e, largest null %.3e)",
            deviation,
            nulls.max() if nulls.size else 0.0,
        )
    return OlaCertificate(holds=holds, constant=constant, spectral_nulls_ok=spectral_ok, deviation=deviation)


def _require_ola(w: Window, a: int) -> OlaCertificate:
    cert = ola_check(w, a)
    if not cert.holds:
        raise OlaViolated(
            f"overlap-add constraint violated: translate sums deviate by {cert.deviation:.3e} "
            f"from {cert.constant:.6g}",
            deviation=cert.deviation,
        )
    return cert


def _overlap_add(L: int, parts: List[Tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
    """Sum (positions, values) contributions in the order given."""
    if not parts:
        return np.zeros(L, dtype=complex)
    pos = np.concatenate([p for p, _ in parts])
    vals = np.concatenate([v for _, v in parts])
    return np.bincount(pos, weights=vals.real, minlength=L) + 1j * np.bincount(
        pos, weights=vals.imag, minlength=L
    )


def ola_reconstruct(X: np.ndarray, g: GaborSystem, counter: Optional[OpCounter] = None) -> np.ndarray:
    """x[t] = (a / w^[0]) sum_n IDFT_M(X[., n]) on the arc of T_{na}w."""
    cert = _require_ola(g.window, g.a)
    if g.M < g.window.length:
        raise ModulationTooCoarse(f"overlap-add needs M >= len(w), got M={g.M} < {g.window.length}")
    X = np.asarray(X)
    if X.shape != (g.M, g.N):
        raise ConfigError(f"coefficient matrix has shape {X.shape}, expected {(g.M, g.N)}")

    blocks = sp_fft.ifft(X.T, axis=1)
    charge_fft(counter, g.M, g.N)
    parts = []
    for n in range(g.N):
        pos, clock = g.window.arc(n * g.a)
        parts.append((pos, blocks[n, clock % g.M]))
    charge(counter, "scale", g.L)
    return _overlap_add(g.L, parts) / cert.constant


def gola_reconstruct(C: CoefficientSet, g: GaborSystem, counter: Optional[OpCounter] = None) -> np.ndarray:
    """Generalized overlap-add: per-piece IDFT at length M[n, r], scaled by a / w^[0]."""
    cert = _require_ola(g.window, g.a)
    sel = C.selection
    fam = family(g)

    merged = np.zeros(g.L)
    for piece in sel.pieces:
        profile = fam.profile(piece.r)
        if sel.mod_counts[piece] < profile.length:
            raise ModulationTooCoarse(
                f"piece {tuple(piece)}: M={sel.mod_counts[piece]} < len(w_r)={profile.length}"
            )
        pos, _ = profile.arc(piece.n * g.a)
        merged[pos] += profile.arc_values
    deviation = float(np.abs(merged - cert.constant).max())
    if deviation > OLA_RTOL * cert.constant:
        raise OlaViolated(
            f"generalized overlap-add constraint violated by {deviation:.3e}", deviation=deviation
        )

    parts = []
    for piece in sel.pieces:
        M = sel.mod_counts[piece]
        profile = fam.profile(piece.r)
        block = sp_fft.ifft(C.entries[piece])
        charge_fft(counter, M)
        pos, clock = profile.arc(piece.n * g.a)
        parts.append((pos, block[clock % M]))
    charge(counter, "scale", g.L)
    return _overlap_add(g.L, parts) / cert.constant


# ============================
# Dual frames
# ============================

class DualOrigin(str, Enum):
    CANONICAL = "canonical_inverse"
    LAPPED = "lapped_closed_form"
    DYADIC = "dyadic_closed_form"


@dataclass(frozen=True, eq=False)
class DualFrame:
    """Unmodulated dual windows, one per piece, stored along the piece's window arc.

    ``clock0[piece]`` is the unwrapped clock of the first arc sample; sample j
    sits at position (clock0 + j) mod L and modulate m carries the phase
    exp(2 pi i m (clock0 + j) / M[n, r]).
    """

    duals: Dict[Piece, np.ndarray] = field(repr=False)
    clock0: Dict[Piece, int] = field(repr=False)
    origin: DualOrigin
    selection: SelectionFunction
    L: int

    def window(self, piece: Piece) -> np.ndarray:
        """The dual window as a length-L vector."""
        out = np.zeros(self.L)
        samples = self.duals[piece]
        out[(self.clock0[piece] + np.arange(samples.size)) % self.L] = samples
        return out


def canonical_dual(sel: SelectionFunction, g: GaborSystem, counter: Optional[OpCounter] = None) -> DualFrame:
    """Duals T_{na}w_r / diag(S) with the Walnut diagonal of the selection."""
    diag = superposition_frame_operator(sel, g).diagonal
    fam = family(g)
    duals, clock0 = {}, {}
    for piece in sel.pieces:
        profile = fam.profile(piece.r)
        pos, clock = profile.arc(piece.n * g.a)
        vals = profile.arc_values
        duals[piece] = np.divide(vals, diag[pos], out=np.zeros(vals.size), where=vals > 0)
        clock0[piece] = int(clock[0])
        charge(counter, "dual", 2 * vals.size)
    return DualFrame(duals=duals, clock0=clock0, origin=DualOrigin.CANONICAL, selection=sel, L=g.L)


def dual_reconstruct(C: CoefficientSet, D: DualFrame, counter: Optional[OpCounter] = None) -> np.ndarray:
    """sum over pieces and modulates of <x, phi> times the dual element."""
    if not C.selection.matches(D.selection):
        raise SelectionMismatch("dual frame was built for a different selection")
    parts = []
    for piece in C.selection.pieces:
        M = C.selection.mod_counts[piece]
        block = sp_fft.ifft(C.entries[piece], norm="forward")
        charge_fft(counter, M)
        dual = D.duals[piece]
        clock = D.clock0[piece] + np.arange(dual.size, dtype=np.int64)
        parts.append((clock % D.L, block[clock % M] * dual))
        charge(counter, "dual", dual.size)
    return _overlap_add(D.L, parts)


# ============================
# Pre-computed duals
# ============================

@dataclass(frozen=True, eq=False)
class LappedSets:
    left: np.ndarray
    center: np.ndarray
    right: np.ndarray


@dataclass(frozen=True, eq=False)
class DualProfiles:
    """Dual windows per merge order at translate 0, valid for any partition using them."""

    profiles: Dict[int, np.ndarray] = field(repr=False)
    M_g: int
    a: int
    origin: DualOrigin

    def __getitem__(self, r: int) -> np.ndarray:
        return self.profiles[r]

    def __contains__(self, r: int) -> bool:
        return r in self.profiles

    def restrict(self, sel: SelectionFunction, g: GaborSystem) -> DualFrame:
        """The dual frame of one selection: T_{na} of the order-r profile per piece.

        Profiles scale as 1/M_g, so one set serves every constant selection
        whose M_g still covers each piece.
        """
        if not sel.constant:
            raise SelectionMismatch("pre-computed duals need a selection with one modulation count")
        if self.origin is DualOrigin.DYADIC and sel.mode is not Mode.DYADIC:
            raise SelectionMismatch("dyadic duals need a dyadic selection")
        scale = self.M_g / sel.M_g
        fam = family(g)
        duals, clock0 = {}, {}
        for piece in sel.pieces:
            if piece.r not in self.profiles:
                raise SelectionMismatch(f"no pre-computed dual for merge order r={piece.r}")
            if fam.length(piece.r) > sel.M_g:
                raise SelectionMismatch(
                    f"piece ({piece.n}, {piece.r}) is longer than M_g={sel.M_g}"
                )
            pos, clock = fam.profile(piece.r).arc(piece.n * g.a)
            duals[piece] = scale * self.profiles[piece.r][(pos - piece.n * g.a) % g.L]
            clock0[piece] = int(clock[0])
        return DualFrame(duals=duals, clock0=clock0, origin=self.origin, selection=sel, L=g.L)


def neighbor_overlap_check(w: Window, a: int) -> bool:
    """True iff translates more than one step apart (cyclically) have disjoint supports."""
    if w.L % a:
        raise ConfigError(f"time step a={a} must divide L={w.L}")
    if w.length <= 2 * a:
        return True
    N = w.L // a
    nz = w.samples > 0
    return not any(np.any(nz & np.roll(nz, k * a)) for k in range(2, N - 1))


def _require_neighbor_overlap(w: Window, a: int) -> None:
    if not neighbor_overlap_check(w, a):
        raise NeighborOverlapViolated()
    if w.length <= 2 * a:
        return
    cover = sum(np.roll(w.samples > 0, n * a).astype(int) for n in range(w.L // a))
    if cover.max() > 2:
        raise NeighborOverlapViolated("neighbor-overlap violated: three translates share a sample")


def lapped_sets(w: Window, a: int, r: int, profile: Optional[Window] = None) -> LappedSets:
    """Left overlap, flat center and right overlap of supp(w_r).

    left = supp(w) & supp(T_{-a}w), right = supp(T_{ra}w) & supp(T_{(r+1)a}w),
    center = the rest of supp(w_r). With all translates merged only the center
    remains.
    """
    N = w.L // a
    if profile is None:
        profile = SuperpositionFamily(w, a).profile(r)
    supp_r = np.flatnonzero(profile.samples)
    if r == N - 1:
        empty = np.array([], dtype=int)
        return LappedSets(left=empty, center=supp_r, right=empty)
    nz = w.samples > 0
    left = np.flatnonzero(nz & np.roll(nz, -a))
    right = np.flatnonzero(np.roll(nz, r * a) & np.roll(nz, (r + 1) * a))
    right = np.setdiff1d(right, left)
    center = np.setdiff1d(supp_r, np.union1d(left, right))
    return LappedSets(left=left, center=center, right=right)


def lapped_duals(w: Window, a: int, M_g: int) -> DualProfiles:
    """Partition-independent duals for global selections of an overlap-add window.

    On the left set the dual is w / (M_g sum_n |w[t-na]|^2), on the right set
    w[t - ra] over the same denominator, and a / (M_g w^[0]) on the center.
    """
    cert = _require_ola(w, a)
    _require_neighbor_overlap(w, a)
    N = w.L // a
    g = GaborSystem(w, a, M_g)
    fam = family(g)
    energy = M_g * translate_energy(w, a)
    flat = 1.0 / (M_g * cert.constant)

    profiles: Dict[int, np.ndarray] = {}
    for r in range(N):
        if fam.length(r) > M_g:
            break
        sets = lapped_sets(w, a, r, fam.profile(r))
        dual = np.zeros(w.L)
        dual[sets.center] = flat
        dual[sets.left] = w.samples[sets.left] / energy[sets.left]
        dual[sets.right] = w.samples[(sets.right - r * a) % w.L] / energy[sets.right]
        profiles[r] = dual
    logger.info("lapped duals for %d merge orders at M_g=%d", len(profiles), M_g)
    return DualProfiles(profiles=profiles, M_g=M_g, a=a, origin=DualOrigin.LAPPED)


def dyadic_duals(w: Window, a: int, M_g: int) -> DualProfiles:
    """Duals of each dyadic level's own Gabor frame G(w_r, a(r+1), L/M_g), r = 2^h - 1.

    Overlap-add is not required.
    """
    _require_neighbor_overlap(w, a)
    N = w.L // a
    if not is_power_of_two(N):
        raise NotPowerOfTwo(f"dyadic duals need N a power of two, got N={N}")
    fam = family(GaborSystem(w, a, M_g))

    profiles: Dict[int, np.ndarray] = {}
    for h in range(int(math.log2(N)) + 1):
        r = 2 ** h - 1
        profile = fam.profile(r)
        if profile.length > M_g:
            logger.debug("dyadic level r=%d skipped: len %d > M_g=%d", r, profile.length, M_g)
            continue
        denom = M_g * translate_energy(profile, a * (r + 1))
        vals = profile.samples
        profiles[r] = np.divide(vals, denom, out=np.zeros(w.L), where=vals > 0)
    logger.info("dyadic duals for levels %s at M_g=%d", sorted(profiles), M_g)
    return DualProfiles(profiles=profiles, M_g=M_g, a=a, origin=DualOrigin.DYADIC)


# ============================
# Operation counts
# ============================

_PLAN_CONSTANTS = {
    "analysis": 1.0,
    "ola": 0.0,
    "gola": 0.0,
    "canonical_dual": 3.0,
    "lapped": 1.0,
    "dyadic": 1.0,
}


def count_multiplies(plan: str, sel: Optional[SelectionFunction], g: GaborSystem) -> int:
    """Complex multiplies of an analysis or synthesis path.

    Each piece costs M (c + log2 M) with c = 1 for analysis and pre-computed
    dual synthesis, 0 for overlap-add and 3 for canonical duals. Without a
    selection the plain Gabor system's N pieces of size M are counted.
    """
    if plan not in _PLAN_CONSTANTS:
        raise ConfigError(f"unknown plan {plan!r}; expected one of {sorted(_PLAN_CONSTANTS)}")
    c = _PLAN_CONSTANTS[plan]
    sizes = [g.M] * g.N if sel is None else [sel.mod_counts[p] for p in sel.pieces]
    total = sum(M * (c + math.log2(M)) for M in sizes)
    return int(math.ceil(total - 1e-9))
