"""Shared test utilities: analytic oracles and output-file parsing."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def decoupled_spectrum(omega: float, omega0: float, two_j: int, x_max: int) -> np.ndarray:
    """Analytic gamma=0 spectrum: sorted multiset {omega*n + omega0*m}."""
    n = np.arange(x_max + 1)
    m = np.arange(-two_j, two_j + 1, 2) / 2.0
    return np.sort((omega * n[:, None] + omega0 * m[None, :]).ravel())


def read_csv(path: str | Path):
    """Parse a result CSV into (config dict, comment lines, columns, rows of strings)."""
    config = None
    comments = []
    columns = None
    rows = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("# config: "):
            config = json.loads(line[len("# config: "):])
        elif line.startswith("# "):
            comments.append(line[2:])
        elif columns is None:
            columns = line.split(",")
        else:
            rows.append(line.split(","))
    return config, comments, columns, rows


def column(rows: list[list[str]], columns: list[str], name: str, cast=float) -> list:
    idx = columns.index(name)
    return [cast(row[idx]) if row[idx] != "" else None for row in rows]
