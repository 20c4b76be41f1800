"""Delimited table output.

Floats are written with ``repr`` so they round-trip exactly; undefined
values (NaN) are written as empty fields.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return "" if math.isnan(v) else repr(v)
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def write_table(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def read_table(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader]


def read_numeric_columns(path, key: str | None = None) -> dict[str, np.ndarray]:
    """Parse a table whose non-key columns are numeric; empty fields -> NaN."""
    header, rows = read_table(path)
    cols: dict[str, np.ndarray] = {}
    for j, name in enumerate(header):
        raw = [r[j] for r in rows]
        if name == key:
            cols[name] = np.array([int(v) for v in raw])
        else:
            cols[name] = np.array([float(v) if v != "" else np.nan for v in raw])
    return cols


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
