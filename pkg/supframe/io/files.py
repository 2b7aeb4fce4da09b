"""
JSON envelopes for partitions, coefficient sets, dual frames and experiment
reports, plus plot-ready CSV exports. Every JSON document is validated
against its schema before it is written and after it is read.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from supframe.errors import ConfigError, SelectionMismatch, StorageError
from supframe.experiments.models import ExperimentConfig, ExperimentReport
from supframe.frames.gabor import GaborSystem
from supframe.frames.reconstruct import DualFrame, DualOrigin
from supframe.frames.signal import Window
from supframe.frames.superposition import (
    CoefficientSet,
    Mode,
    OrderedPartition,
    Piece,
    SelectionFunction,
    family,
    make_selection,
)
from supframe.frames.windows import make_window
from supframe.io.schema import (
    COEFFICIENTS_SCHEMA,
    DUAL_FRAME_SCHEMA,
    EXPERIMENT_CONFIG_SCHEMA,
    EXPERIMENT_REPORT_SCHEMA,
    PARTITION_SCHEMA,
    validate,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
DB_FLOOR = 1e-12


def read_json(path: PathLike) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise StorageError(f"cannot read {path}: {e.strerror or e}") from e
    except json.JSONDecodeError as e:
        raise StorageError(f"{path} is not valid JSON: {e.msg} at line {e.lineno}") from e


def write_json(path: PathLike, data: Any) -> Path:
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, sort_keys=True, ensure_ascii=False)
            f.write("\n")
    except OSError as e:
        raise StorageError(f"cannot write {path}: {e.strerror or e}") from e
    return path


# ============================
# Windows and systems
# ============================

def window_record(window: Window, spec: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
    """Named-window description when known, raw samples otherwise."""
    if spec is not None:
        return {"name": spec["name"], "winlen": int(spec["winlen"]), "periodic": bool(spec.get("periodic", False))}
    return {"samples": window.samples.tolist()}


def window_from_record(record: Mapping[str, Any], L: int) -> Window:
    if "samples" in record:
        samples = np.asarray(record["samples"], dtype=float)
        if samples.size != L:
            raise ConfigError(f"window has {samples.size} samples, expected L={L}")
        return Window(samples)
    return make_window(record["name"], record["winlen"], L, record.get("periodic", False))


# ============================
# Partitions
# ============================

def save_partition(
    path: PathLike,
    partition: OrderedPartition,
    mode: Optional[str] = None,
    scores: Optional[Mapping[Piece, float]] = None,
    algorithm: Optional[str] = None,
) -> Path:
    data = partition.to_dict()
    if mode is not None:
        data["mode"] = Mode(mode).value
    if algorithm is not None:
        data["algorithm"] = algorithm
    if scores is not None:
        for entry in data["pieces"]:
            entry["score"] = float(scores[Piece(entry["n"], entry["r"])])
    validate(data, PARTITION_SCHEMA)
    return write_json(path, data)


def load_partition(path: PathLike) -> Tuple[OrderedPartition, Optional[Mode]]:
    data = read_json(path)
    validate(data, PARTITION_SCHEMA)
    mode = Mode(data["mode"]) if "mode" in data else None
    return OrderedPartition.from_dict(data), mode


# ============================
# Coefficient sets
# ============================

def save_coefficients(
    path: PathLike,
    C: CoefficientSet,
    g: GaborSystem,
    window_spec: Optional[Mapping[str, Any]] = None,
    sample_rate: Optional[int] = None,
) -> Path:
    sel = C.selection
    data: Dict[str, Any] = {
        "L": g.L,
        "a": g.a,
        "M": g.M,
        "N": g.N,
        "mode": sel.mode.value,
        "window": window_record(g.window, window_spec),
        "pieces": [
            {
                "n": p.n,
                "r": p.r,
                "M": sel.mod_counts[p],
                "re": C.entries[p].real.tolist(),
                "im": C.entries[p].imag.tolist(),
            }
            for p in sel.pieces
        ],
    }
    if sample_rate is not None:
        data["sample_rate"] = int(sample_rate)
    validate(data, COEFFICIENTS_SCHEMA)
    return write_json(path, data)


def load_coefficients(path: PathLike) -> Tuple[CoefficientSet, GaborSystem, Optional[int]]:
    data = read_json(path)
    validate(data, COEFFICIENTS_SCHEMA)
    L = data["L"]
    g = GaborSystem(window_from_record(data["window"], L), data["a"], data["M"])
    partition = OrderedPartition(data["N"], tuple(Piece(e["n"], e["r"]) for e in data["pieces"]))
    sel = make_selection(partition, g, data["mode"])
    entries = {}
    for e in data["pieces"]:
        piece = Piece(e["n"], e["r"])
        if e["M"] != sel.mod_counts[piece]:
            raise SelectionMismatch(
                f"piece ({e['n']}, {e['r']}) stores M={e['M']}, the {sel.mode.value} plan gives {sel.mod_counts[piece]}"
            )
        entries[piece] = np.asarray(e["re"], dtype=float) + 1j * np.asarray(e["im"], dtype=float)
    return CoefficientSet(entries, sel), g, data.get("sample_rate")


# ============================
# Dual frames
# ============================

def save_dual_frame(path: PathLike, D: DualFrame) -> Path:
    sel = D.selection
    data = {
        "L": D.L,
        "N": sel.partition.N,
        "mode": sel.mode.value,
        "origin": D.origin.value,
        "duals": [
            {
                "n": p.n,
                "r": p.r,
                "M": sel.mod_counts[p],
                "start": D.clock0[p],
                "samples": D.duals[p].tolist(),
            }
            for p in sel.pieces
        ],
    }
    validate(data, DUAL_FRAME_SCHEMA)
    return write_json(path, data)


def load_dual_frame(path: PathLike) -> DualFrame:
    data = read_json(path)
    validate(data, DUAL_FRAME_SCHEMA)
    records = data["duals"]
    partition = OrderedPartition(data["N"], tuple(Piece(e["n"], e["r"]) for e in records))
    sel = SelectionFunction(
        partition=partition,
        mode=Mode(data["mode"]),
        mod_counts={Piece(e["n"], e["r"]): e["M"] for e in records},
    )
    return DualFrame(
        duals={Piece(e["n"], e["r"]): np.asarray(e["samples"], dtype=float) for e in records},
        clock0={Piece(e["n"], e["r"]): e["start"] for e in records},
        origin=DualOrigin(data["origin"]),
        selection=sel,
        L=data["L"],
    )


# ============================
# Experiments
# ============================

def load_experiment_config(path: PathLike) -> ExperimentConfig:
    data = read_json(path)
    validate(data, EXPERIMENT_CONFIG_SCHEMA)
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid experiment config: {e.errors()[0]['msg']}") from e


def write_report_json(report: ExperimentReport, path: PathLike) -> Path:
    data = report.model_dump(mode="json")
    validate(data, EXPERIMENT_REPORT_SCHEMA)
    validate(data["config"], EXPERIMENT_CONFIG_SCHEMA)
    return write_json(path, data)


# ============================
# CSV exports
# ============================

def write_spectrogram_csv(C: CoefficientSet, g: GaborSystem, path: PathLike) -> Path:
    """One row per coefficient: translate, merge order, bin, bin count, start sample, level in dB."""
    fam = family(g)
    path = Path(path)
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["n", "r", "m", "M", "t_start", "db"])
            for piece in C.selection.pieces:
                coefs = C.entries[piece]
                db = 10 * np.log10(np.maximum(np.abs(coefs) ** 2, DB_FLOOR))
                t_start = int(fam.profile(piece.r).arc(piece.n * g.a)[0][0])
                for m, level in enumerate(db):
                    writer.writerow([piece.n, piece.r, m, coefs.size, t_start, f"{level:.4f}"])
    except OSError as e:
        raise StorageError(f"cannot write {path}: {e.strerror or e}") from e
    return path


def write_scores_csv(
    partition: OrderedPartition,
    scores: Mapping[Piece, float],
    g: GaborSystem,
    path: PathLike,
) -> Path:
    fam = family(g)
    path = Path(path)
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["n", "r", "t_start", "length", "score"])
            for piece in partition.pieces:
                profile = fam.profile(piece.r)
                t_start = int(profile.arc(piece.n * g.a)[0][0])
                writer.writerow([piece.n, piece.r, t_start, profile.length, f"{scores[piece]:.10g}"])
    except OSError as e:
        raise StorageError(f"cannot write {path}: {e.strerror or e}") from e
    return path
