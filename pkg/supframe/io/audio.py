"""WAV input and output through soundfile. Only mono files are accepted."""

import logging
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import soundfile as sf

from supframe.errors import AudioFormatError, StorageError

logger = logging.getLogger(__name__)

SUBTYPES = ("PCM_16", "FLOAT")


def read_wav(
    path: Union[str, Path],
    length: Optional[int] = None,
    fit: bool = False,
) -> Tuple[np.ndarray, int]:
    """Samples as float64 and the sample rate.

    With ``length`` set the file must hold exactly that many samples unless
    ``fit`` is true, in which case it is cropped or zero-padded to it.
    """
    try:
        info = sf.info(str(path))
    except RuntimeError as e:
        raise AudioFormatError(f"{path}: {e}") from e
    except OSError as e:
        raise StorageError(f"cannot read {path}: {e}") from e
    if info.channels != 1:
        raise AudioFormatError(f"{path} has {info.channels} channels; only mono is supported")
    if info.subtype not in SUBTYPES:
        raise AudioFormatError(f"{path} has subtype {info.subtype}; expected one of {SUBTYPES}")

    x, rate = sf.read(str(path), dtype="float64", always_2d=False)
    if length is not None and x.size != length:
        if not fit:
            raise AudioFormatError(f"{path} holds {x.size} samples, expected {length}")
        logger.info("fitting %s from %d to %d samples", path, x.size, length)
        x = np.pad(x[:length], (0, max(0, length - x.size)))
    return x, int(rate)


def write_wav(path: Union[str, Path], x: np.ndarray, sample_rate: int, subtype: str = "FLOAT") -> Path:
    """Write the real part of ``x``; imaginary residue from synthesis is dropped."""
    if subtype not in SUBTYPES:
        raise AudioFormatError(f"unsupported subtype {subtype}")
    data = np.real(np.asarray(x))
    if subtype == "PCM_16":
        data = np.clip(data, -1.0, 1.0)
    try:
        sf.write(str(path), data, int(sample_rate), subtype=subtype)
    except (RuntimeError, OSError) as e:
        raise StorageError(f"cannot write {path}: {e}") from e
    return Path(path)
