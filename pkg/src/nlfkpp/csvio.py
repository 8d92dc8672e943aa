"""CSV writing/reading with round-trippable floats and LF line endings."""

from __future__ import annotations

import numpy as np


def fmt(value) -> str:
    """17 significant digits: enough to round-trip any double."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(path, header, columns) -> None:
    columns = [np.asarray(c) for c in columns]
    n = len(columns[0])
    if any(len(c) != n for c in columns):
        raise ValueError("all columns must have equal length")
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(n):
            fh.write(",".join(fmt(c[i]) for c in columns) + "\n")


def read_csv(path):
    """Return (header, columns-as-float-arrays)."""
    with open(path, "r", newline="\n") as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    cols = [np.array([float(r[i]) for r in rows]) for i in range(len(header))]
    return header, cols
