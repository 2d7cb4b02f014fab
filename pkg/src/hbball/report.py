"""Bit-stable JSON/CSV report emission (12 significant digits, sorted keys)."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, is_dataclass
from pathlib import Path

import numpy as np

__all__ = ["normalize", "dumps_json", "dumps_csv", "write_report", "flatten"]

DIGITS = 12


def _num(x: float):
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    v = float(f"{x:.{DIGITS}g}")
    return 0.0 if v == 0 else v


def normalize(obj):
    """Convert records to plain JSON types with floats rounded to 12 digits.

    Complex numbers become ``[re, im]``; non-finite floats become strings.
    """
    if hasattr(obj, "to_dict"):
        return normalize(obj.to_dict())
    if is_dataclass(obj) and not isinstance(obj, type):
        return normalize(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [normalize(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return [_num(obj.real), _num(obj.imag)]
    return obj


def dumps_json(records) -> str:
    return json.dumps(normalize(records), sort_keys=True, indent=2) + "\n"


def flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v, sort_keys=True)
        else:
            out[key] = v
    return out


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.{DIGITS}g}"
    if v is None:
        return ""
    return str(v)


def dumps_csv(records, header=None) -> str:
    rows = [flatten(normalize(r)) for r in records]
    if header is None:
        header = sorted({k for r in rows for k in r})
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    wr.writerow(header)
    for r in rows:
        wr.writerow([_cell(r.get(k)) for k in header])
    return buf.getvalue()


def write_report(records, fmt: str, path, header=None) -> None:
    """Write ``records`` as ``json`` or ``csv``; raises ``OSError`` on I/O failure."""
    if fmt == "json":
        text = dumps_json(records)
    elif fmt == "csv":
        text = dumps_csv(records, header)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    Path(path).write_text(text, newline="")
