"""
Operation-count and wall-time benchmark of analysis and every synthesis path.

Each path runs with an OpCounter; the measured count is compared to the
closed-form count for the same selection.
"""

import csv
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Sequence, Union

import numpy as np

from supframe.errors import ConfigError
from supframe.frames.counting import OpCounter
from supframe.frames.gabor import GaborSystem, stft_analyze
from supframe.frames.reconstruct import (
    canonical_dual,
    count_multiplies,
    dual_reconstruct,
    dyadic_duals,
    gola_reconstruct,
    lapped_duals,
    ola_reconstruct,
)
from supframe.frames.superposition import (
    OrderedPartition,
    make_selection,
    random_dyadic_partition,
    random_partition,
    superposition_analyze,
)
from supframe.frames.windows import make_window

logger = logging.getLogger(__name__)

BENCH_WINLEN = 64
BENCH_HOP = 32


@dataclass(frozen=True)
class BenchRow:
    L: int
    path: str
    measured: int
    formula: int
    seconds: float

    @property
    def ratio(self) -> float:
        return self.measured / self.formula if self.formula else math.inf


@dataclass
class BenchReport:
    rows: List[BenchRow] = field(default_factory=list)

    def exponents(self) -> Dict[str, float]:
        """Least-squares slope of log(seconds) against log(L) per path."""
        slopes = {}
        for path in dict.fromkeys(row.path for row in self.rows):
            pts = [(row.L, row.seconds) for row in self.rows if row.path == path and row.seconds > 0]
            if len({L for L, _ in pts}) >= 2:
                logL, logT = np.log([p[0] for p in pts]), np.log([p[1] for p in pts])
                slopes[path] = float(np.polyfit(logL, logT, 1)[0])
        return slopes


def _timed(fn: Callable[[OpCounter], object]):
    counter = OpCounter()
    start = time.perf_counter()
    result = fn(counter)
    return result, counter.multiplies, time.perf_counter() - start


def bench_size(L: int, rng: np.random.Generator, r_max: int = 7) -> List[BenchRow]:
    if L % BENCH_HOP or L < 4 * BENCH_HOP:
        raise ConfigError(f"benchmark size L={L} must be a multiple of {BENCH_HOP} and at least {4 * BENCH_HOP}")
    w = make_window("hamming", BENCH_WINLEN, L, periodic=True)
    g = GaborSystem(w, BENCH_HOP, BENCH_WINLEN)
    x = rng.standard_normal(L)
    rows: List[BenchRow] = []

    def record(path: str, plan: str, sel, fn):
        result, measured, seconds = _timed(fn)
        rows.append(BenchRow(L, path, measured, count_multiplies(plan, sel, g), seconds))
        return result

    X = record("stft_analysis", "analysis", None, lambda c: stft_analyze(x, g, c))
    record("ola", "ola", None, lambda c: ola_reconstruct(X, g, c))

    sel = make_selection(random_partition(g.N, rng, r_max), g, "global")
    C = record("analysis", "analysis", sel, lambda c: superposition_analyze(x, g, sel, c))
    record("gola", "gola", sel, lambda c: gola_reconstruct(C, g, c))
    record("canonical_dual", "canonical_dual", sel, lambda c: dual_reconstruct(C, canonical_dual(sel, g, c), c))

    lapped = lapped_duals(w, BENCH_HOP, sel.M_g).restrict(sel, g)
    record("lapped", "lapped", sel, lambda c: dual_reconstruct(C, lapped, c))

    if g.N & (g.N - 1) == 0:
        dsel = make_selection(random_dyadic_partition(g.N, rng, max_order=r_max), g, "dyadic")
        D = superposition_analyze(x, g, dsel)
        dyadic = dyadic_duals(w, BENCH_HOP, dsel.M_g).restrict(dsel, g)
        record("dyadic", "dyadic", dsel, lambda c: dual_reconstruct(D, dyadic, c))
    return rows


def run_bench(sizes: Sequence[int], seed: int = 0, r_max: int = 7) -> BenchReport:
    if not sizes:
        raise ConfigError("benchmark needs at least one size")
    rng = np.random.default_rng(seed)
    report = BenchReport()
    for L in sizes:
        rows = bench_size(int(L), rng, r_max)
        report.rows.extend(rows)
        logger.info("bench L=%d: %s", L, ", ".join(f"{r.path} {r.ratio:.2f}" for r in rows))
    return report


def write_bench_csv(report: BenchReport, path: Union[str, Path]) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["L", "path", "measured", "formula", "ratio", "seconds"])
        for row in report.rows:
            writer.writerow([row.L, row.path, row.measured, row.formula, f"{row.ratio:.4f}", f"{row.seconds:.6f}"])
    return path
