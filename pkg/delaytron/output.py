"""CSV, manifest and report emission."""

import csv
import hashlib
import json
import logging
import math
import os
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, List, Optional, Sequence

from . import __version__
from .circuits import Scheme
from .exceptions import OutputError
from .experiment import ComparisonTable, IntensityRecord, Mode, SweepConfig

logger = logging.getLogger(__name__)

CSV_HEADER: List[str] = [
    "scheme",
    "alpha",
    "phi",
    "branch",
    "mode",
    "e0",
    "e1",
    "joint_e0",
    "branch_prob",
    "shots",
    "stderr0",
    "stderr1",
]

SIGNIFICANT_DIGITS = 12
# Values below this magnitude are written as 0 so rounding noise never reaches the file.
ZERO_CUTOFF = 1e-15


def format_value(value: Any) -> str:
    """Render one CSV cell: 12 significant digits, empty string for missing values."""
    if value is None:
        return ""
    if isinstance(value, (Scheme, Mode)):
        return value.value
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise OutputError(f"Cannot write non-finite value {value!r}")
        if abs(value) < ZERO_CUTOFF:
            return "0"
        return format(value, f".{SIGNIFICANT_DIGITS}g")
    return str(value)


def _record_row(record: IntensityRecord) -> List[str]:
    return [
        format_value(v)
        for v in (
            record.scheme,
            record.alpha,
            record.phi,
            record.branch,
            record.mode,
            record.e0,
            record.e1,
            record.joint_e0,
            record.branch_prob,
            record.shots_used,
            record.stderr0,
            record.stderr1,
        )
    ]


def write_table(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Write a header plus formatted rows as CSV.

    Raises:
        OutputError: If the file cannot be written.
    """
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_value(v) for v in row])
    except OSError as e:
        raise OutputError(f"Failed to write {path}", str(e))
    logger.info("Wrote %s", path)


def write_csv(records: Sequence[IntensityRecord], path: str) -> None:
    """Write intensity records sorted by (alpha, phi, branch)."""
    ordered = sorted(records, key=lambda r: r.sort_key)
    write_table(path, CSV_HEADER, (_record_row(r) for r in ordered))


def _optional(text: str, cast: Any) -> Any:
    return cast(text) if text != "" else None


def read_csv(path: str) -> List[IntensityRecord]:
    """Parse a file produced by :func:`write_csv` back into records.

    Raises:
        OutputError: If the file is missing, unreadable or has another header.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f))
    except OSError as e:
        raise OutputError(f"Failed to read {path}", str(e))

    if not rows or rows[0] != CSV_HEADER:
        raise OutputError(f"{path} is not an intensity CSV", "unexpected header")

    records = []
    for line_number, row in enumerate(rows[1:], start=2):
        if len(row) != len(CSV_HEADER):
            raise OutputError(f"{path}:{line_number} has {len(row)} fields, expected {len(CSV_HEADER)}")
        fields = dict(zip(CSV_HEADER, row))
        try:
            records.append(
                IntensityRecord(
                    scheme=Scheme(fields["scheme"]),
                    alpha=float(fields["alpha"]),
                    phi=float(fields["phi"]),
                    branch=_optional(fields["branch"], int),
                    mode=Mode(fields["mode"]),
                    e0=float(fields["e0"]),
                    e1=float(fields["e1"]),
                    joint_e0=_optional(fields["joint_e0"], float),
                    branch_prob=_optional(fields["branch_prob"], float),
                    shots_used=_optional(fields["shots"], int),
                    stderr0=_optional(fields["stderr0"], float),
                    stderr1=_optional(fields["stderr1"], float),
                )
            )
        except ValueError as e:
            raise OutputError(f"{path}:{line_number} is malformed", str(e))
    return records


def config_hash(config: SweepConfig) -> str:
    """SHA-256 of the canonical JSON form of ``config``."""
    canonical = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def manifest_path(output_path: str) -> str:
    return f"{output_path}.manifest.json"


def build_manifest(
    config: Optional[SweepConfig],
    outputs: Sequence[str],
    command: str,
    parameters: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    manifest: Dict[str, Any] = {
        "tool": "delaytron",
        "version": __version__,
        "command": command,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "outputs": [os.path.basename(p) for p in outputs],
    }
    if config is not None:
        manifest["config"] = config.to_dict()
        manifest["config_hash"] = config_hash(config)
    if parameters:
        manifest["parameters"] = parameters
    return manifest


def write_manifest(
    output_path: str,
    config: Optional[SweepConfig],
    outputs: Sequence[str],
    command: str,
    parameters: Optional[Dict[str, Any]] = None,
) -> str:
    """Write the provenance manifest next to ``output_path`` and return its path.

    The manifest's ``config`` block is a complete sweep config document, so
    it can be fed back to ``delaytron run``.
    """
    path = manifest_path(output_path)
    manifest = build_manifest(config, outputs, command, parameters)
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write("\n")
    except OSError as e:
        raise OutputError(f"Failed to write manifest {path}", str(e))
    logger.info("Wrote manifest %s", path)
    return path


def render_comparison_report(table: ComparisonTable) -> str:
    """Markdown summary of a QM vs hidden-variable comparison."""
    lines = [
        "# Quantum vs hidden-variable intensities",
        "",
        f"Herald branch: q2 = {table.branch}",
        f"Phase points: {len(table.phi_values)}",
        "",
        "The hidden-variable D0 intensity 1/4 + cos^2(phi/2)/2 does not depend on alpha.",
        "Quantum values are simulated conditional intensities P(q0=0 | q2=branch).",
        "",
        "## Maximum divergence per alpha",
        "",
        "| alpha | max abs(QM - HV) | at phi |",
        "|---|---|---|",
    ]
    for entry in table.max_divergence:
        lines.append(
            f"| {format_value(entry.alpha)} | {format_value(entry.value)} | {format_value(entry.phi)} |"
        )

    lines += [
        "",
        "## Discrepancy: as-printed closed form vs simulated circuit",
        "",
        "The printed closed form for the entangled-ancilla intensity is reproduced",
        "AS PRINTED. It does not match the simulated circuit: at alpha = 0, phi = 0,",
        "branch 0 it gives 1.0 where the circuit gives a conditional intensity of 0.5",
        "and a joint intensity of 0.25. Simulated values are the ground truth.",
        "",
        "| alpha | phi | branch | as printed | simulated conditional | simulated joint "
        "| printed - conditional | printed - joint | label |",
        "|---|---|---|---|---|---|---|---|---|",
    ]
    for entry in table.discrepancies:
        lines.append(
            "| "
            + " | ".join(
                format_value(v)
                for v in (
                    entry.alpha,
                    entry.phi,
                    entry.branch,
                    entry.printed,
                    entry.conditional,
                    entry.joint,
                    entry.conditional_gap,
                    entry.joint_gap,
                )
            )
            + " | DISCREPANCY |"
        )
    lines.append("")
    return "\n".join(lines)


def write_report(table: ComparisonTable, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(render_comparison_report(table))
    except OSError as e:
        raise OutputError(f"Failed to write report {path}", str(e))
    logger.info("Wrote report %s", path)
