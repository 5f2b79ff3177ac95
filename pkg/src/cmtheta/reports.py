"""Machine-readable report emission: JSON reports and CSV matrices."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


def _jsonable(obj):
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_json(path, obj) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, default=_jsonable)
    Path(path).write_text(text + "\n", encoding="utf-8")


def matrix_to_jsonable(m: np.ndarray):
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m, dtype=complex)]


def matrix_to_csv(path, m: np.ndarray) -> None:
    """Row-major CSV with alternating re/im columns."""
    m = np.asarray(m, dtype=complex)
    header = []
    for k in range(m.shape[1]):
        header += [f"re_{k}", f"im_{k}"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in m:
            flat = []
            for v in row:
                flat += [repr(float(v.real)), repr(float(v.imag))]
            writer.writerow(flat)


def matrix_report(m: np.ndarray, metadata: dict) -> dict:
    report = dict(metadata)
    report["matrix"] = matrix_to_jsonable(m)
    return report
