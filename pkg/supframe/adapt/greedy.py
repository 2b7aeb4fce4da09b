"""
Greedy adaptation.

Walk the translates left to right, growing the current piece one translate
at a time. A merge is kept only when the merged window's concentration beats
both the current piece and the incoming translate on its own; otherwise the
piece is closed and a new one starts.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Tuple

from supframe.adapt.costs import concentration_score, piece_coefficients
from supframe.errors import ConfigError
from supframe.frames.gabor import GaborSystem
from supframe.frames.signal import as_signal
from supframe.frames.superposition import OrderedPartition, Piece

logger = logging.getLogger(__name__)

DEFAULT_R_MAX = 7
# relative band inside which two concentrations count as a tie (ties reject)
TIE_RTOL = 1e-12

ResetRule = Literal["restart", "skip"]


@dataclass(frozen=True)
class Proposal:
    anchor: int
    order: int
    candidate: int
    merged: float
    piece: float
    single: float
    accepted: bool


@dataclass(frozen=True)
class GreedyResult:
    partition: OrderedPartition
    scores: Dict[Piece, float] = field(repr=False)
    trace: Tuple[Proposal, ...] = field(repr=False)


def greedy_search(
    x,
    g: GaborSystem,
    r_max: int = DEFAULT_R_MAX,
    reset: ResetRule = "restart",
) -> GreedyResult:
    """Greedy partition with the full proposal trace.

    ``reset="restart"`` starts the next piece at the rejected translate.
    ``reset="skip"`` follows the update (p, n_p) <- (p, n + p + 1) literally:
    the p + 1 translates from the rejected one on become single-window
    pieces and the next piece starts past them with the same merge order p,
    clipped to the end of Z_N.
    """
    if r_max < 0:
        raise ConfigError(f"r_max must be nonnegative, got {r_max}")
    if reset not in ("restart", "skip"):
        raise ConfigError(f"unknown reset rule {reset!r}")
    x = as_signal(x)
    N = g.N
    cache: Dict[Tuple[int, int], float] = {}

    def score(n: int, r: int) -> float:
        if (n, r) not in cache:
            cache[(n, r)] = concentration_score(piece_coefficients(x, g, n, r))
        return cache[(n, r)]

    pieces: List[Piece] = []
    trace: List[Proposal] = []
    anchor, p = 0, 0
    candidate = 1
    while candidate < N:
        if p + 1 > r_max:
            trace.append(Proposal(anchor, p, candidate, math.nan, math.nan, math.nan, False))
            accepted = False
        else:
            merged, piece, single = score(anchor, p + 1), score(anchor, p), score(candidate, 0)
            accepted = merged > max(piece, single) * (1 + TIE_RTOL)
            trace.append(Proposal(anchor, p, candidate, merged, piece, single, accepted))

        if accepted:
            p += 1
        else:
            pieces.append(Piece(anchor, p))
            if reset == "skip":
                nxt = min(candidate + p + 1, N)
                pieces.extend(Piece(k, 0) for k in range(candidate, nxt))
                anchor = nxt
                p = max(0, min(p, N - 1 - anchor))
            else:
                anchor = candidate
                p = 0
        candidate = anchor + p + 1
    if anchor < N:
        pieces.append(Piece(anchor, p))

    partition = OrderedPartition(N, tuple(pieces))
    scores = {piece: score(piece.n, piece.r) for piece in partition.pieces}
    merges = sum(1 for prop in trace if prop.accepted)
    logger.info("greedy adaptation: %d pieces from %d translates (%d merges)", len(pieces), N, merges)
    return GreedyResult(partition=partition, scores=scores, trace=tuple(trace))


def greedy_adapt(
    x,
    g: GaborSystem,
    r_max: int = DEFAULT_R_MAX,
    reset: ResetRule = "restart",
) -> OrderedPartition:
    return greedy_search(x, g, r_max, reset).partition
