"""Report envelopes and canonical JSON serialization.

Every CLI report is an envelope {tool_version, command, config, results,
warnings}. Serialization is canonical: keys sorted, floats rounded to 12
significant digits, so identical inputs and seeds produce byte-identical
reports.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from . import __version__


def _jsonify(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if not np.isfinite(f):
            return None
        return float(format(f, ".12g"))
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialise {type(obj).__name__} into a report")


def canonical_json(obj) -> str:
    return json.dumps(_jsonify(obj), sort_keys=True, indent=2) + "\n"


def envelope(command: str, config: dict, results, warning_list) -> dict:
    """Assemble a report envelope; warnings are deduplicated and sorted so
    the serialisation is independent of scheduling."""
    return {
        "tool_version": __version__,
        "command": command,
        "config": config,
        "results": results,
        "warnings": sorted(set(str(w) for w in warning_list)),
    }


def write_report(report: dict, out) -> str:
    text = canonical_json(report)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    return text


def write_csv(rows, out) -> None:
    """Flat CSV projection of report rows (list of uniform dicts)."""
    rows = list(rows)
    path = Path(out)
    if not rows:
        path.write_text("", encoding="utf-8")
        return
    fields = sorted(rows[0].keys())
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _csv_cell(row.get(k)) for k in fields})


def _csv_cell(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    if isinstance(v, (int, np.integer)):
        return int(v)
    return v
