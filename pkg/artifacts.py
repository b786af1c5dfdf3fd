"""
Output Artifacts

CSV and JSON writers for transform tables, recovery tables and class
reports. Every file echoes the resolved configuration (CSV: leading `#`
lines; JSON: a `meta` object) and is written in one go at the end of a run.
Identical inputs give byte-identical files.
"""

import csv
import io
import json
import math
from typing import Any, Dict, List, Sequence

TRANSFORM_COLUMNS = ("k_re", "k_im", "F_re", "F_im", "abs_err")
SCAN_COLUMNS = ("qp", "F_re", "F_im", "abs_err")
RECOVERY_COLUMNS = ("x", "f_true", "f_recovered", "abs_err", "flagged")


def format_float(value: float) -> str:
    """Scientific notation with 17 significant digits."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.16e}"


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return format_float(value)
    return str(value)


def plain(value: Any) -> Any:
    """Convert numpy scalars, complex numbers and tuples into JSON-ready data."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, complex):
        return [float(value.real), float(value.imag)]
    if hasattr(value, "item"):
        return plain(value.item())
    if isinstance(value, int):
        return value
    return float(value)


def render_csv(columns: Sequence[str], records: List[Dict[str, Any]], meta: Dict[str, Any]) -> str:
    buffer = io.StringIO()
    for key in sorted(meta):
        buffer.write(f"# {key}: {json.dumps(plain(meta[key]), sort_keys=True)}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for record in records:
        writer.writerow([_cell(record[c]) for c in columns])
    return buffer.getvalue()


def render_json(records: List[Dict[str, Any]], meta: Dict[str, Any]) -> str:
    document = {"meta": plain(meta), "records": plain(records)}
    return json.dumps(document, indent=2, sort_keys=True, allow_nan=True) + "\n"


def render_table(columns: Sequence[str], records: List[Dict[str, Any]],
                 meta: Dict[str, Any], fmt: str) -> str:
    """Render records as `csv` or `json`."""
    if fmt == "csv":
        return render_csv(columns, records, meta)
    if fmt == "json":
        return render_json([{c: r[c] for c in columns} for r in records], meta)
    raise ValueError(f"unknown output format {fmt!r}")


def render_report(report: Dict[str, Any], meta: Dict[str, Any]) -> str:
    """JSON document for nested reports (class verification)."""
    document = dict(plain(report))
    document["meta"] = plain(meta)
    return json.dumps(document, indent=2, sort_keys=True, allow_nan=True) + "\n"


def write_text(path: str, text: str) -> None:
    with open(path, "w", newline="") as handle:
        handle.write(text)
