"""Complex-multiply bookkeeping shared by analysis and synthesis."""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional


def fft_multiplies(M: int) -> int:
    """Nominal cost of one length-M transform: a radix-2 butterfly per pair per stage."""
    if M <= 1:
        return 0
    return math.ceil(M * math.log2(M) / 2)


@dataclass
class OpCounter:
    multiplies: int = 0
    by_stage: Dict[str, int] = field(default_factory=dict)

    def add(self, stage: str, count: int) -> None:
        count = int(count)
        self.multiplies += count
        self.by_stage[stage] = self.by_stage.get(stage, 0) + count

    def fft(self, M: int, transforms: int = 1) -> None:
        self.add("fft", transforms * fft_multiplies(M))


def charge(counter: Optional[OpCounter], stage: str, count: int) -> None:
    if counter is not None:
        counter.add(stage, count)


def charge_fft(counter: Optional[OpCounter], M: int, transforms: int = 1) -> None:
    if counter is not None:
        counter.fft(M, transforms)
