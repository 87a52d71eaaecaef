"""Deterministic CSV/JSON writers shared by all artifact producers.

Floats are written with 17 significant digits so every value round-trips
bit-exactly; identical inputs therefore give byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .exceptions import ConfigError


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in np.atleast_2d(np.asarray(rows)) if not isinstance(rows, list) else rows:
        lines.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def read_csv(path, expected_header):
    """Parse a CSV written by this package; returns {column: float array}.

    Raises ConfigError naming the first offending row on any mismatch.
    """
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ConfigError(f"{path}: empty file")
    header = [h.strip() for h in lines[0].split(",")]
    if header != list(expected_header):
        raise ConfigError(
            f"{path}: header {header!r} does not match expected {list(expected_header)!r}")
    cols = {name: [] for name in header}
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != len(header):
            raise ConfigError(f"{path}: row {lineno} has {len(parts)} fields, "
                              f"expected {len(header)}")
        for name, part in zip(header, parts):
            try:
                cols[name].append(float(part))
            except ValueError as exc:
                raise ConfigError(f"{path}: row {lineno}: bad value {part!r} "
                                  f"in column {name}") from exc
    return {name: np.asarray(vals) for name, vals in cols.items()}


def write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())
