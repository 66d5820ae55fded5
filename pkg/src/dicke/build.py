"""Basis-dispatching build and solve helpers shared by the analysis layer and CLI."""

from __future__ import annotations

import numpy as np

from .coherent import build_coherent_hamiltonian
from .eigensolver import EigenSolution, eigenvalues_only, eigh
from .fock import build_fock_hamiltonian
from .model import (
    DEFAULT_DIMENSION_CAP,
    BasisKind,
    BasisSpec,
    ModelParams,
    SymmetricMatrix,
)

_BUILDERS = {
    BasisKind.FOCK: build_fock_hamiltonian,
    BasisKind.COHERENT: build_coherent_hamiltonian,
}


def build_hamiltonian(
    params: ModelParams, spec: BasisSpec, cap: int = DEFAULT_DIMENSION_CAP
) -> SymmetricMatrix:
    return _BUILDERS[BasisKind(spec.kind)](params, spec.x_max, cap=cap)


def solve(
    params: ModelParams, spec: BasisSpec, cap: int = DEFAULT_DIMENSION_CAP
) -> EigenSolution:
    """Build and fully diagonalize in one step."""
    return eigh(build_hamiltonian(params, spec, cap=cap))


def spectrum(
    params: ModelParams, spec: BasisSpec, cap: int = DEFAULT_DIMENSION_CAP
) -> np.ndarray:
    """Ascending eigenvalues only (no eigenvectors)."""
    return eigenvalues_only(build_hamiltonian(params, spec, cap=cap))
