"""Deterministic JSON / CSV emission.

Floats are rounded to 12 significant digits, non-finite floats become the
strings ``"inf"``, ``"-inf"``, ``"nan"``, complex numbers become ``[re, im]``.
Dictionary order is preserved, so equal inputs give byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

__all__ = ["clean", "dumps_json", "rows_to_csv", "write_report"]

DIGITS = 12


def _float(x: float):
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.{DIGITS}g}")


def clean(obj):
    """Convert to plain JSON-compatible data with fixed float precision."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return [_float(obj.real), _float(obj.imag)]
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return clean(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj) -> str:
    return json.dumps(clean(obj), indent=2, allow_nan=False) + "\n"


def _cell(v) -> str:
    v = clean(v)
    if isinstance(v, float):
        return f"{v:.{DIGITS}g}"
    if isinstance(v, list):
        return json.dumps(v)
    return str(v)


def rows_to_csv(rows: list[dict]) -> str:
    """CSV text with the columns of the first row, in order."""
    buf = io.StringIO()
    if not rows:
        return ""
    cols = list(rows[0].keys())
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in rows:
        writer.writerow([_cell(r.get(c, "")) for c in cols])
    return buf.getvalue()


def write_report(report: dict, path, fmt: str = "json") -> str:
    """Serialize ``report`` (CSV uses ``report["rows"]``) and write it unless ``path`` is None."""
    if fmt == "json":
        text = dumps_json(report)
    elif fmt == "csv":
        text = rows_to_csv(report.get("rows", []))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text
