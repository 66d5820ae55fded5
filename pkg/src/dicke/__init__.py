"""Finite-size Dicke model: exact diagonalization in the truncated Fock and
extended bosonic coherent bases, with energy and wave-function convergence
analysis across truncations."""

from .build import build_hamiltonian, solve, spectrum
from .coherent import (
    build_coherent_hamiltonian,
    coherent_to_fock,
    displaced_overlap,
    displacement_unit,
    overlap_kernel,
)
from .convergence import (
    ConvergenceReport,
    FitResult,
    MinTruncationResult,
    ProbabilityProfile,
    convergence_count_grid,
    convergence_report,
    converged_prefix,
    count_converged,
    delta_e,
    delta_e_values,
    delta_p,
    find_min_truncation,
    linear_fit,
    next_layer_weights,
    probability_profile,
    top_layer_weights,
)
from .eigensolver import EigenSolution, eigenvalues_only, eigh, residual
from .fock import build_fock_hamiltonian
from .model import (
    DEFAULT_DIMENSION_CAP,
    BasisKind,
    BasisSpec,
    DimensionCapError,
    ModelParams,
    StateIndex,
    SymmetricMatrix,
    basis_states,
    flat_index,
    make_params,
    parity_sign,
    parity_vector,
    raising_coefficient,
    state_index,
)

__all__ = [
    "BasisKind",
    "BasisSpec",
    "ConvergenceReport",
    "DEFAULT_DIMENSION_CAP",
    "DimensionCapError",
    "EigenSolution",
    "FitResult",
    "MinTruncationResult",
    "ModelParams",
    "ProbabilityProfile",
    "StateIndex",
    "SymmetricMatrix",
    "basis_states",
    "build_coherent_hamiltonian",
    "build_fock_hamiltonian",
    "build_hamiltonian",
    "coherent_to_fock",
    "convergence_count_grid",
    "convergence_report",
    "converged_prefix",
    "count_converged",
    "delta_e",
    "delta_e_values",
    "delta_p",
    "displaced_overlap",
    "displacement_unit",
    "eigenvalues_only",
    "eigh",
    "find_min_truncation",
    "flat_index",
    "linear_fit",
    "make_params",
    "next_layer_weights",
    "overlap_kernel",
    "parity_sign",
    "parity_vector",
    "probability_profile",
    "raising_coefficient",
    "residual",
    "solve",
    "spectrum",
    "state_index",
    "top_layer_weights",
]

__version__ = "0.1.0"
