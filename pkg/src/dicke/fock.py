"""Dicke Hamiltonian in the truncated photon-number basis |n; j, m>.

H = omega*a'a + omega0*Jz + (gamma/sqrt(N_atoms))*(a + a')(J+ + J-)
"""

from __future__ import annotations

import math

import numpy as np

from .model import (
    DEFAULT_DIMENSION_CAP,
    BasisKind,
    BasisSpec,
    ModelParams,
    SymmetricMatrix,
    check_dimension,
    spin_raising_matrix,
    spin_z_values,
)


def boson_position_matrix(n_max: int) -> np.ndarray:
    """Matrix of a + a' on photon layers 0..n_max; symmetric by construction."""
    x = np.zeros((n_max + 1, n_max + 1))
    rungs = np.sqrt(np.arange(1.0, n_max + 1))
    x[np.arange(n_max), np.arange(1, n_max + 1)] = rungs
    x[np.arange(1, n_max + 1), np.arange(n_max)] = rungs
    return x


def build_fock_hamiltonian(
    params: ModelParams, n_max: int, cap: int = DEFAULT_DIMENSION_CAP
) -> SymmetricMatrix:
    """Assemble the dense (n_max+1)(2j+1) Hamiltonian, flat layout n*(2j+1)+(m+j).

    Built as a Kronecker sum of exactly-symmetric factors, so each symmetric
    pair of entries is the product of the same two floats and the result is
    symmetric to the last bit.
    """
    if not isinstance(n_max, (int, np.integer)) or n_max < 0:
        raise ValueError(f"n_max must be a non-negative integer, got {n_max!r}")
    check_dimension(params.two_j, n_max, cap)

    m = spin_z_values(params.two_j)
    jp = spin_raising_matrix(params.two_j)
    spin_flip = jp + jp.T  # J+ + J-
    eye_spin = np.eye(params.two_j + 1)

    n = np.arange(n_max + 1, dtype=float)
    eye_boson = np.eye(n_max + 1)

    coupling = params.gamma / math.sqrt(params.n_atoms)
    entries = (
        params.omega * np.kron(np.diag(n), eye_spin)
        + params.omega0 * np.kron(eye_boson, np.diag(m))
        + coupling * np.kron(boson_position_matrix(n_max), spin_flip)
    )
    entries.setflags(write=False)
    return SymmetricMatrix(
        params=params,
        basis=BasisSpec(kind=BasisKind.FOCK, x_max=int(n_max)),
        entries=entries,
    )
