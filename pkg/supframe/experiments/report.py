import csv
import hashlib
import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Union

from reportlab.lib import colors
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import getSampleStyleSheet
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

CSV_FIELDS = [
    "method", "kind", "snr_db", "rule", "mean_gain_db", "std_gain_db",
    "structure_fraction", "mean_pieces", "trials",
]


def canonical_json(payload: Dict[str, Any]) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def payload_hash(payload: Dict[str, Any]) -> str:
    return hashlib.sha256(canonical_json(payload)).hexdigest()


def write_report_csv(report, path: PathLike) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for res in report.results:
            writer.writerow({
                "method": res.method,
                "kind": res.kind,
                "snr_db": "inf" if res.snr_db is None else res.snr_db,
                "rule": res.rule,
                "mean_gain_db": f"{res.mean_gain_db:.6f}",
                "std_gain_db": f"{res.std_gain_db:.6f}",
                "structure_fraction": "" if res.structure_fraction is None else f"{res.structure_fraction:.4f}",
                "mean_pieces": f"{res.mean_pieces:.3f}",
                "trials": len(res.gains_db),
            })
    return path


def write_report_pdf(report, path: PathLike) -> Path:
    """One-page summary: provenance block and the gain table."""
    path = Path(path)
    doc = SimpleDocTemplate(str(path), pagesize=A4)
    styles = getSampleStyleSheet()
    elements = [Paragraph("Superposition-frame denoising report", styles["Title"]), Spacer(1, 12)]

    provenance = {
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "signal_length": report.config.length,
        "trials": report.trials,
        "base_seed": report.config.seed,
        "noise_generator": report.noise_generator,
        "payload_hash": report.payload_hash,
    }
    for key, value in provenance.items():
        elements.append(Paragraph(f"<b>{key}</b>: {value}", styles["Normal"]))
        elements.append(Spacer(1, 4))
    elements.append(Spacer(1, 12))

    rows = [["method", "SNR (dB)", "rule", "gain (dB)", "std (dB)", "structure"]]
    for res in report.results:
        rows.append([
            res.method,
            "inf" if res.snr_db is None else f"{res.snr_db:g}",
            res.rule,
            f"{res.mean_gain_db:.2f}",
            f"{res.std_gain_db:.2f}",
            "-" if res.structure_fraction is None else f"{res.structure_fraction:.2f}",
        ])
    table = Table(rows, repeatRows=1)
    table.setStyle(TableStyle([
        ("FONTNAME", (0, 0), (-1, 0), "Helvetica-Bold"),
        ("GRID", (0, 0), (-1, -1), 0.25, colors.grey),
        ("ALIGN", (1, 1), (-1, -1), "RIGHT"),
    ]))
    elements.append(table)
    doc.build(elements)
    logger.info("wrote PDF report %s", path)
    return path
