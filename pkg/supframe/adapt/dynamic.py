"""
Partition selection by dynamic programming.

Each candidate piece (n, r) is scored on the part of the signal its
translates dominate, with an additive segment cost; the optimal prefix costs
J*_k = min_r J*_{k-r-1} + J(k-r-1, r) are then backtracked into a partition.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from supframe.adapt.costs import SegmentCost, entropy_cost, piece_coefficients
from supframe.adapt.greedy import DEFAULT_R_MAX
from supframe.errors import ConfigError
from supframe.frames.gabor import GaborSystem
from supframe.frames.signal import as_signal
from supframe.frames.superposition import OrderedPartition, Piece

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class DpTable:
    J_star: np.ndarray
    back: np.ndarray
    owner: np.ndarray
    segment_costs: Dict[Piece, float] = field(repr=False)

    def D(self, n: int) -> np.ndarray:
        """Samples where translate n strictly dominates every other translate."""
        return np.flatnonzero(self.owner == n)


@dataclass(frozen=True)
class DpResult:
    partition: OrderedPartition
    scores: Dict[Piece, float] = field(repr=False)
    table: DpTable = field(repr=False)


def dominance_sets(g: GaborSystem) -> np.ndarray:
    """Owner translate of every sample, -1 where no translate is positive.

    A sample belongs to the translate with the largest window value; ties go
    to the smaller translate index.
    """
    L = g.L
    best = np.zeros(L)
    owner = np.full(L, -1, dtype=int)
    w = g.window
    for n in range(g.N):
        pos, _ = w.arc(n * g.a)
        vals = w.arc_values
        wins = vals > best[pos]
        best[pos[wins]] = vals[wins]
        owner[pos[wins]] = n
    return owner


def solve_prefix(costs: Dict[Piece, float], N: int, r_max: int) -> Tuple[np.ndarray, np.ndarray, OrderedPartition]:
    """Optimal prefix costs, boundary choices and the backtracked partition.

    Orders are scanned upward with a strict comparison, so ties keep the
    shorter piece.
    """
    J = np.zeros(N + 1)
    back = np.zeros(N + 1, dtype=int)
    for k in range(1, N + 1):
        best, choice = np.inf, 0
        for r in range(min(r_max, k - 1) + 1):
            value = J[k - r - 1] + costs[Piece(k - r - 1, r)]
            if value < best:
                best, choice = value, r
        J[k], back[k] = best, choice

    pieces = []
    k = N
    while k > 0:
        r = int(back[k])
        pieces.append(Piece(k - r - 1, r))
        k -= r + 1
    return J, back, OrderedPartition(N, tuple(pieces))


def dp_search(
    x,
    g: GaborSystem,
    cost: SegmentCost = entropy_cost,
    r_max: int = DEFAULT_R_MAX,
) -> DpResult:
    if r_max < 0:
        raise ConfigError(f"r_max must be nonnegative, got {r_max}")
    x = as_signal(x)
    N = g.N
    total_energy = float(np.vdot(x, x).real)
    owner = dominance_sets(g)

    costs: Dict[Piece, float] = {}
    for n in range(N):
        for r in range(min(r_max, N - 1 - n) + 1):
            restricted = np.where((owner >= n) & (owner <= n + r), x, 0)
            costs[Piece(n, r)] = float(cost(piece_coefficients(restricted, g, n, r), total_energy))

    J, back, partition = solve_prefix(costs, N, r_max)
    pieces = partition.pieces
    logger.info("dp adaptation: %d pieces, total cost %.6g", len(pieces), J[N])
    table = DpTable(J_star=J, back=back, owner=owner, segment_costs=costs)
    return DpResult(
        partition=partition,
        scores={p: costs[p] for p in partition.pieces},
        table=table,
    )


def dp_adapt(
    x,
    g: GaborSystem,
    cost: SegmentCost = entropy_cost,
    r_max: int = DEFAULT_R_MAX,
) -> OrderedPartition:
    return dp_search(x, g, cost, r_max).partition
