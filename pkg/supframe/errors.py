"""
supframe - error hierarchy

Every failure a user can trigger is a SupframeError carrying the process exit
code the CLI reports it with:

    2  validation (bad flags, malformed files, inconsistent partitions)
    3  mathematical precondition (not a frame, COLA violated, ...)
    4  I/O (unreadable or unsupported audio / JSON files)
"""

from typing import List, Optional


class SupframeError(Exception):
    exit_code: int = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


# ============================
# Validation (exit 2)
# ============================

class InputError(SupframeError):
    exit_code = 2


class ConfigError(InputError):
    pass


class PartitionError(InputError):
    """An ordered partition violates one of its defining properties.

    ``prop`` is 0 for range / stick-length errors and 1-3 for the three
    partition properties (distinct starts, disjoint pieces, exact tiling).
    """

    def __init__(self, prop: int, detail: str):
        super().__init__(f"partition property {prop} violated: {detail}")
        self.prop = prop


class DyadicShapeError(InputError):
    pass


class SelectionMismatch(InputError):
    pass


class ComponentOverflow(InputError):
    pass


class SchemaViolation(InputError):
    def __init__(self, schema: str, errors: List[str]):
        super().__init__(f"{schema}: " + "; ".join(errors))
        self.schema = schema
        self.errors = errors


# ============================
# Mathematical preconditions (exit 3)
# ============================

class PreconditionError(SupframeError):
    exit_code = 3


class AllZeroWindow(PreconditionError):
    def __init__(self, detail: str = "window is identically zero"):
        super().__init__(detail)


class NotAFrame(PreconditionError):
    def __init__(self, lower: float, upper: float):
        super().__init__(
            f"not a frame: lower bound {lower:.3e} is below the rank threshold "
            f"for upper bound {upper:.3e}"
        )
        self.lower = lower
        self.upper = upper


class RefinementTooCoarse(PreconditionError):
    pass


class ModulationTooCoarse(PreconditionError):
    pass


class NonconstantModulation(PreconditionError):
    pass


class OlaViolated(PreconditionError):
    def __init__(self, detail: str = "overlap-add constraint violated", deviation: Optional[float] = None):
        super().__init__(detail)
        self.deviation = deviation


class NeighborOverlapViolated(PreconditionError):
    def __init__(self, detail: str = "neighbor-overlap violated"):
        super().__init__(detail)


class NotPowerOfTwo(PreconditionError):
    pass


class ZeroSignal(PreconditionError):
    def __init__(self, detail: str = "signal has zero energy"):
        super().__init__(detail)


class BoundViolation(PreconditionError):
    pass


# ============================
# I/O (exit 4)
# ============================

class StorageError(SupframeError):
    exit_code = 4


class AudioFormatError(StorageError):
    pass
