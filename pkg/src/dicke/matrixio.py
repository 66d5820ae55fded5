"""Optional binary dump of assembled Hamiltonians, for debugging.

Format: 16-byte header — 4 magic bytes "DKHM", little-endian u32 dimension,
8 zero padding bytes — followed by the dim*dim matrix entries as row-major
little-endian 64-bit floats.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"DKHM"
HEADER_SIZE = 16


def write_matrix_dump(path: str | Path, entries: np.ndarray) -> None:
    entries = np.ascontiguousarray(entries, dtype="<f8")
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {entries.shape}")
    header = MAGIC + struct.pack("<I", entries.shape[0]) + b"\x00" * 8
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(entries.tobytes())


def read_matrix_dump(path: str | Path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.read(HEADER_SIZE)
        if len(header) != HEADER_SIZE or header[:4] != MAGIC:
            raise ValueError(f"{path}: not a matrix dump (bad header)")
        (dim,) = struct.unpack("<I", header[4:8])
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != dim * dim:
        raise ValueError(f"{path}: truncated dump ({data.size} values for dim {dim})")
    return data.reshape(dim, dim)
