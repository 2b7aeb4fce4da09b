"""
Superposition windows and the variable-resolution systems they induce.

A superposition window w_r is the sum of r+1 adjacent translates of the base
window. An ordered partition of Z_N into pieces (n, r) says which translates
merge; a selection function adds a modulation count M[n, r] per piece. The
coefficients of piece (n, r) are stored at the local modulation index
m in Z_{M[n, r]}.
"""

import itertools
import logging
import threading
import weakref
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from supframe.errors import (
    BoundViolation,
    ConfigError,
    DyadicShapeError,
    ModulationTooCoarse,
    NonconstantModulation,
    PartitionError,
    SelectionMismatch,
)
from supframe.frames.counting import OpCounter
from supframe.frames.gabor import (
    FrameBounds,
    FrameOperator,
    GaborSystem,
    analyze_translates,
    elements,
    frame_bounds,
    frame_operator,
    translate_energy,
)
from supframe.frames.signal import Window, as_signal, translate

logger = logging.getLogger(__name__)

BOUND_RTOL = 1e-9


class Piece(NamedTuple):
    n: int
    r: int


class Mode(str, Enum):
    LOCAL = "local"
    GLOBAL = "global"
    DYADIC = "dyadic"


def is_power_of_two(k: int) -> bool:
    return k > 0 and k & (k - 1) == 0


# ============================
# Superposition windows
# ============================

@dataclass(frozen=True, eq=False)
class SuperpositionWindow:
    r: int
    n: int
    window: Window


class SuperpositionFamily:
    """Merged profiles w_r of one base window, built once per order r."""

    def __init__(self, window: Window, a: int):
        self.window = window
        self.a = a
        self._profiles: Dict[int, Window] = {0: window}

    @property
    def N(self) -> int:
        return self.window.L // self.a

    def profile(self, r: int) -> Window:
        if not 0 <= r < self.N:
            raise ConfigError(f"merge order r={r} outside [0, {self.N})")
        if r not in self._profiles:
            self._profiles[r] = Window(self.profile(r - 1).samples + np.roll(self.window.samples, r * self.a))
        return self._profiles[r]

    def length(self, r: int) -> int:
        return self.profile(r).length


_families: "weakref.WeakKeyDictionary[GaborSystem, SuperpositionFamily]" = weakref.WeakKeyDictionary()
_families_lock = threading.Lock()


def family(g: GaborSystem) -> SuperpositionFamily:
    with _families_lock:
        fam = _families.get(g)
        if fam is None:
            fam = _families[g] = SuperpositionFamily(g.window, g.a)
    return fam


def superposition_window(w: Window, a: int, r: int, n: int = 0) -> SuperpositionWindow:
    """sum_{k=0}^{r} T_{(n+k)a} w."""
    if w.L % a:
        raise ConfigError(f"time step a={a} must divide L={w.L}")
    profile = SuperpositionFamily(w, a).profile(r)
    return SuperpositionWindow(r=r, n=n, window=translate(profile, n * a))


# ============================
# Ordered partitions
# ============================

@dataclass(frozen=True)
class PartitionViolation:
    prop: int
    detail: str


@dataclass(frozen=True)
class OrderedPartition:
    N: int
    pieces: Tuple[Piece, ...]

    def __post_init__(self):
        pieces = tuple(sorted(Piece(int(n), int(r)) for n, r in self.pieces))
        object.__setattr__(self, "pieces", pieces)

    @classmethod
    def uniform(cls, N: int) -> "OrderedPartition":
        return cls(N, tuple(Piece(n, 0) for n in range(N)))

    @classmethod
    def merged(cls, N: int) -> "OrderedPartition":
        return cls(N, (Piece(0, N - 1),))

    @classmethod
    def from_orders(cls, N: int, orders: Sequence[int], offset: int = 0) -> "OrderedPartition":
        """Consecutive pieces with the given merge orders, starting at ``offset``."""
        pieces, n = [], offset
        for r in orders:
            pieces.append(Piece(n % N, r))
            n += r + 1
        return cls(N, tuple(pieces))

    def translates(self, piece: Piece) -> List[int]:
        return [(piece.n + k) % self.N for k in range(piece.r + 1)]

    def owner(self) -> np.ndarray:
        """Index of the piece holding each translate."""
        owner = np.empty(self.N, dtype=int)
        for i, piece in enumerate(self.pieces):
            owner[self.translates(piece)] = i
        return owner

    def to_dict(self) -> dict:
        return {"N": self.N, "pieces": [{"n": p.n, "r": p.r} for p in self.pieces]}

    @classmethod
    def from_dict(cls, data: dict) -> "OrderedPartition":
        return cls(int(data["N"]), tuple(Piece(int(p["n"]), int(p["r"])) for p in data["pieces"]))


def validate_partition(p: OrderedPartition) -> Optional[PartitionViolation]:
    """First violated partition property, or None.

    0: pieces out of range; 1: starts not distinct; 2: pieces overlap;
    3: pieces do not tile Z_N (stick length sum differs from N).
    """
    if p.N < 1:
        return PartitionViolation(0, f"N={p.N} must be positive")
    for n, r in p.pieces:
        if not (0 <= n < p.N and 0 <= r < p.N):
            return PartitionViolation(0, f"piece ({n}, {r}) outside Z_{p.N}")

    starts = [piece.n for piece in p.pieces]
    if len(set(starts)) != len(starts):
        return PartitionViolation(1, "two pieces share a start index")

    covered = np.zeros(p.N, dtype=int)
    for piece in p.pieces:
        for k in p.translates(piece):
            covered[k] += 1
            if covered[k] > 1:
                return PartitionViolation(2, f"translate {k} lies in more than one piece")

    total = sum(r + 1 for _, r in p.pieces)
    if total != p.N:
        missing = np.flatnonzero(covered == 0).tolist()
        return PartitionViolation(3, f"pieces cover {total} of {p.N} translates, missing {missing}")
    return None


def iter_partitions(N: int, max_order: Optional[int] = None) -> Iterator[OrderedPartition]:
    """Every partition of Z_N into consecutive pieces anchored at 0."""
    cap = N if max_order is None else min(max_order + 1, N)
    for cuts in itertools.product((False, True), repeat=N - 1):
        orders, run = [], 1
        for cut in cuts:
            if cut:
                orders.append(run - 1)
                run = 1
            else:
                run += 1
        orders.append(run - 1)
        if max(orders) + 1 <= cap:
            yield OrderedPartition.from_orders(N, orders)


def random_partition(
    N: int,
    rng: np.random.Generator,
    max_order: Optional[int] = None,
    wrap: bool = False,
) -> OrderedPartition:
    """Random stick-breaking, optionally rotated so a piece may wrap."""
    cap = N if max_order is None else max_order + 1
    orders, remaining = [], N
    while remaining:
        size = int(rng.integers(1, min(cap, remaining) + 1))
        orders.append(size - 1)
        remaining -= size
    offset = int(rng.integers(0, N)) if wrap else 0
    return OrderedPartition.from_orders(N, orders, offset)


def random_dyadic_partition(
    N: int,
    rng: np.random.Generator,
    split: float = 0.5,
    max_order: Optional[int] = None,
) -> OrderedPartition:
    """Random leaf set of the dyadic tree over Z_N (N a power of two).

    Blocks longer than max_order + 1 translates are always split.
    """
    cap = N if max_order is None else max_order + 1
    if not is_power_of_two(N):
        raise DyadicShapeError(f"N={N} is not a power of two")
    pieces: List[Piece] = []

    def grow(n: int, size: int):
        if size > 1 and (size > cap or rng.random() < split):
            grow(n, size // 2)
            grow(n + size // 2, size // 2)
        else:
            pieces.append(Piece(n, size - 1))

    grow(0, N)
    return OrderedPartition(N, tuple(pieces))


# ============================
# Selection functions
# ============================

@dataclass(frozen=True, eq=False)
class SelectionFunction:
    partition: OrderedPartition
    mode: Mode
    mod_counts: Dict[Piece, int] = field(repr=False)

    @property
    def pieces(self) -> Tuple[Piece, ...]:
        return self.partition.pieces

    @property
    def M_g(self) -> int:
        return max(self.mod_counts.values())

    @property
    def constant(self) -> bool:
        return len(set(self.mod_counts.values())) == 1

    def matches(self, other: "SelectionFunction") -> bool:
        return self.partition == other.partition and self.mod_counts == other.mod_counts

    def to_dict(self) -> dict:
        data = self.partition.to_dict()
        data["mode"] = self.mode.value
        return data


def make_selection(p: OrderedPartition, g: GaborSystem, mode) -> SelectionFunction:
    """Attach modulation counts to a partition.

    Local: M_r = max(len(w_r), M) per piece. Global: the maximum M_r over the
    selected orders, for every piece. Dyadic: Global over pieces of size 2^h
    aligned to the dyadic tree.
    """
    mode = Mode(mode)
    violation = validate_partition(p)
    if violation is not None:
        raise PartitionError(violation.prop, violation.detail)
    if p.N != g.N:
        raise PartitionError(0, f"partition has N={p.N}, system has N={g.N}")

    if mode is Mode.DYADIC:
        if not is_power_of_two(p.N):
            raise DyadicShapeError(f"N={p.N} is not a power of two")
        for n, r in p.pieces:
            if not is_power_of_two(r + 1) or n % (r + 1):
                raise DyadicShapeError(f"piece ({n}, {r}) is not a dyadic block")

    fam = family(g)
    local = {piece: max(fam.length(piece.r), g.M) for piece in p.pieces}
    if mode is Mode.LOCAL:
        counts = local
    else:
        M_g = max(local.values())
        counts = {piece: M_g for piece in p.pieces}
    return SelectionFunction(partition=p, mode=mode, mod_counts=counts)


# ============================
# Analysis
# ============================

@dataclass(frozen=True, eq=False)
class CoefficientSet:
    entries: Dict[Piece, np.ndarray] = field(repr=False)
    selection: SelectionFunction

    def __post_init__(self):
        if set(self.entries) != set(self.selection.pieces):
            raise SelectionMismatch("coefficient keys differ from the selection's pieces")
        for piece, coefs in self.entries.items():
            if coefs.shape != (self.selection.mod_counts[piece],):
                raise SelectionMismatch(
                    f"piece {tuple(piece)} holds {coefs.shape[0]} coefficients, "
                    f"expected {self.selection.mod_counts[piece]}"
                )

    def map(self, fn: Callable[[Piece, np.ndarray], np.ndarray]) -> "CoefficientSet":
        return CoefficientSet({p: fn(p, c) for p, c in self.entries.items()}, self.selection)

    def energy(self) -> float:
        return float(sum(np.vdot(c, c).real for c in self.entries.values()))

    def check_matches(self, other: "CoefficientSet") -> None:
        if not self.selection.matches(other.selection):
            raise SelectionMismatch("coefficient sets come from different selections")


def superposition_analyze(
    x,
    g: GaborSystem,
    sel: SelectionFunction,
    counter: Optional[OpCounter] = None,
) -> CoefficientSet:
    """<x, M_{m L/M[n,r]} T_{na} w_r> for every piece and local index m."""
    x = as_signal(x)
    if x.size != g.L:
        raise ConfigError(f"signal length {x.size} does not match L={g.L}")
    fam = family(g)
    groups: Dict[Tuple[int, int], List[Piece]] = {}
    for piece in sel.pieces:
        groups.setdefault((piece.r, sel.mod_counts[piece]), []).append(piece)

    entries: Dict[Piece, np.ndarray] = {}
    for (r, M), pieces in groups.items():
        coefs = analyze_translates(x, fam.profile(r), [p.n * g.a for p in pieces], M, counter)
        for piece, row in zip(pieces, coefs):
            entries[piece] = row
    logger.debug("analyzed %d pieces in %d (r, M) groups", len(entries), len(groups))
    return CoefficientSet({p: entries[p] for p in sel.pieces}, sel)


def frame_elements(g: GaborSystem, pieces: Iterable[Piece], mod_counts: Dict[Piece, int]) -> np.ndarray:
    """All superposition frame elements as rows (dense oracle)."""
    fam = family(g)
    blocks = [elements(fam.profile(p.r), [p.n * g.a], mod_counts[p]) for p in pieces]
    return np.vstack(blocks)


def dense_superposition_operator(
    g: GaborSystem,
    pieces: Iterable[Piece],
    mod_counts: Dict[Piece, int],
) -> np.ndarray:
    """Walnut sum of the superposition operator, valid for any modulation counts."""
    fam = family(g)
    S = np.zeros((g.L, g.L))
    for piece in pieces:
        M = mod_counts[piece]
        profile = fam.profile(piece.r)
        pos, clock = profile.arc(piece.n * g.a)
        vals = profile.arc_values
        aliased = (clock[:, None] - clock[None, :]) % M == 0
        S[np.ix_(pos, pos)] += M * np.outer(vals, vals) * aliased
    return S


# ============================
# Frame tests and bounds
# ============================

@dataclass(frozen=True, eq=False)
class SufficiencyReport:
    passed: bool
    margin: np.ndarray = field(repr=False)
    diagonal: np.ndarray = field(repr=False)
    beta_terms: Dict[int, np.ndarray] = field(repr=False)


def sufficiency_test(sel: SelectionFunction, g: GaborSystem, M_g: int) -> SufficiencyReport:
    """Diagonal-dominance test for the system with M_g modulates per piece.

    margin[t] = M_g * (sum beta(0, t) - sum_{k != 0} |sum beta(k M_g, t)|) with
    beta(s, t) = T_{na}w_r[t] * T_{na}w_r[t - s] summed over pieces. Offsets
    k run over every multiple of M_g whose partner sample lies on the same
    window arc; for arcs inside [0, L) that is exactly t - k M_g in [0, L).
    A positive margin everywhere guarantees a frame.
    """
    if sel.mode is Mode.LOCAL and not sel.constant:
        raise NonconstantModulation(
            f"sufficiency test needs one modulation count, selection has "
            f"{sorted(set(sel.mod_counts.values()))}"
        )
    if np.any(g.window.samples < 0):
        raise ConfigError("sufficiency test requires a nonnegative window")
    if M_g < 1:
        raise ConfigError(f"sufficiency test needs M_g >= 1, got {M_g}")

    fam = family(g)
    L = g.L
    diagonal = np.zeros(L)
    beta: Dict[int, np.ndarray] = {}
    for piece in sel.pieces:
        profile = fam.profile(piece.r)
        pos, _ = profile.arc(piece.n * g.a)
        vals = profile.arc_values
        diagonal += np.bincount(pos, weights=vals ** 2, minlength=L)
        for k in range(1, (vals.size - 1) // M_g + 1):
            lag = k * M_g
            prod = vals[lag:] * vals[:-lag]
            # sample j pairs with j - lag (offset +k) and j - lag pairs with j (offset -k)
            beta.setdefault(k, np.zeros(L))
            beta.setdefault(-k, np.zeros(L))
            beta[k] += np.bincount(pos[lag:], weights=prod, minlength=L)
            beta[-k] += np.bincount(pos[:-lag], weights=prod, minlength=L)

    off = sum((np.abs(v) for v in beta.values()), np.zeros(L))
    margin = M_g * (diagonal - off)
    passed = bool(margin.min() > 0)
    logger.debug("sufficiency test M_g=%d: min margin %.3e", M_g, margin.min())
    return SufficiencyReport(
        passed=passed,
        margin=margin,
        diagonal=M_g * diagonal,
        beta_terms={k: M_g * v for k, v in sorted(beta.items())},
    )


def superposition_frame_operator(sel: SelectionFunction, g: GaborSystem) -> FrameOperator:
    """Diagonal operator: sum over pieces of M[n,r] |T_{na} w_r[t]|^2."""
    fam = family(g)
    diag = np.zeros(g.L)
    for piece in sel.pieces:
        profile = fam.profile(piece.r)
        M = sel.mod_counts[piece]
        if M < profile.length:
            raise ModulationTooCoarse(
                f"piece {tuple(piece)} has M={M} < len(w_r)={profile.length}; operator is not diagonal"
            )
        pos, _ = profile.arc(piece.n * g.a)
        diag += np.bincount(pos, weights=M * profile.arc_values ** 2, minlength=g.L)
    return FrameOperator(diagonal=diag)


@dataclass(frozen=True)
class SuperpositionBounds:
    bounds: FrameBounds
    A_opt: float
    B_opt: float
    gabor_lower: float


def superposition_bounds(sel: SelectionFunction, g: GaborSystem) -> SuperpositionBounds:
    """Frame bounds of the selection plus the extremal bounds over all partitions.

    A_opt = max(M, len(w)) * min_t sum_n |T_{na}w[t]|^2 is attained without
    merging; B_opt = max(M, L) * max_t |sum_n T_{na}w[t]|^2 is attained when
    everything merges. The lower bound of the underlying Gabor frame is never
    undercut.
    """
    w = g.window
    gabor_lower = frame_bounds(frame_operator(g)).A
    bounds = frame_bounds(superposition_frame_operator(sel, g))
    if bounds.A < gabor_lower * (1 - BOUND_RTOL):
        raise BoundViolation(
            f"superposition lower bound {bounds.A:.6e} undercuts the Gabor bound {gabor_lower:.6e}"
        )
    summed = w.samples.reshape(g.N, g.a).sum(axis=0)
    A_opt = max(g.M, w.length) * float(translate_energy(w, g.a).min())
    B_opt = max(g.M, g.L) * float((summed ** 2).max())
    return SuperpositionBounds(bounds=bounds, A_opt=A_opt, B_opt=B_opt, gabor_lower=gabor_lower)


# ============================
# Energy identities
# ============================

def localized_energy(x, w: Window, M: int) -> float:
    """M * sum_t |x[t]|^2 |w[t]|^2, the coefficient energy of one window when M >= len(w)."""
    x = as_signal(x)
    return float(M * np.sum(np.abs(x) ** 2 * w.samples ** 2))


def coefficient_energy(coefs: np.ndarray) -> float:
    return float(np.vdot(coefs, coefs).real)
