"""Deterministic artifact writers: number formatting, CSV, JSON.

Every number is serialized with 12 significant digits, a '.' decimal
separator, '\\n' line endings, and UTF-8 encoding, so identical inputs
produce identical bytes regardless of locale, platform defaults, or
how many threads produced the data.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np


def fmt(value) -> str:
    """One CSV cell; floats get 12 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def rounded(payload):
    """JSON-ready copy of a payload.

    Floats are rounded to 12 significant digits; infinities and NaNs
    (the absent-cap sentinel and failed sweep cells) become null so
    the documents stay strictly standard JSON.
    """
    if isinstance(payload, dict):
        return {str(k): rounded(v) for k, v in payload.items()}
    if isinstance(payload, (list, tuple)):
        return [rounded(v) for v in payload]
    if isinstance(payload, np.ndarray):
        return [rounded(v) for v in payload.tolist()]
    if isinstance(payload, (bool, np.bool_)):
        return bool(payload)
    if isinstance(payload, (int, np.integer)):
        return int(payload)
    if isinstance(payload, (float, np.floating)):
        x = float(payload)
        if not math.isfinite(x):
            return None
        return float(f"{x:.12g}")
    return payload


def write_json(path, payload) -> None:
    text = json.dumps(rounded(payload), indent=2, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(cell) for cell in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
