"""
supframe - adaptive short-time Fourier analysis with superposition frames.

Merging adjacent translates of a Gabor window gives a variable-resolution
system that stays a frame, keeps a diagonal frame operator and reconstructs
with FFTs only.
"""

from supframe.errors import InputError, PreconditionError, StorageError, SupframeError
from supframe.frames import (
    CoefficientSet,
    GaborSystem,
    OrderedPartition,
    Piece,
    SelectionFunction,
    Window,
    canonical_dual,
    dual_reconstruct,
    make_selection,
    make_window,
    superposition_analyze,
)

__version__ = "0.1.0"

__all__ = [
    "CoefficientSet",
    "GaborSystem",
    "InputError",
    "OrderedPartition",
    "Piece",
    "PreconditionError",
    "SelectionFunction",
    "StorageError",
    "SupframeError",
    "Window",
    "__version__",
    "canonical_dual",
    "dual_reconstruct",
    "make_selection",
    "make_window",
    "superposition_analyze",
]
