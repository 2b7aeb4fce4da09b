from supframe.io.audio import read_wav, write_wav
from supframe.io.files import (
    load_coefficients,
    load_dual_frame,
    load_experiment_config,
    load_partition,
    read_json,
    save_coefficients,
    save_dual_frame,
    save_partition,
    write_json,
    write_report_json,
    write_scores_csv,
    write_spectrogram_csv,
)
from supframe.io.schema import validate

__all__ = [
    "load_coefficients",
    "load_dual_frame",
    "load_experiment_config",
    "load_partition",
    "read_json",
    "read_wav",
    "save_coefficients",
    "save_dual_frame",
    "save_partition",
    "validate",
    "write_json",
    "write_report_json",
    "write_scores_csv",
    "write_spectrogram_csv",
    "write_wav",
]
