"""Dense real-symmetric eigendecomposition with a fixed sign convention.

Backed by LAPACK via numpy.linalg.eigh; the contract here (ascending
energies, orthonormal columns, deterministic signs, residual check) is what
the tests pin down, independent of the backend.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import BasisSpec, ModelParams, SymmetricMatrix


@dataclass(frozen=True)
class EigenSolution:
    """Ascending energies E_k and coefficient columns C^k, k = 1..D (1-based, k=1 ground)."""

    params: ModelParams
    basis: BasisSpec
    energies: np.ndarray
    coefficients: np.ndarray

    @property
    def dimension(self) -> int:
        return self.energies.shape[0]

    def state(self, k: int) -> np.ndarray:
        """Coefficient column of the k-th state in flat layout."""
        if not 1 <= k <= self.dimension:
            raise ValueError(f"k must be in 1..{self.dimension}, got {k!r}")
        return self.coefficients[:, k - 1]

    def coefficient_table(self, k: int) -> np.ndarray:
        """Coefficients of state k reshaped to (x_max+1, 2j+1), indexed [x, m+j]."""
        return self.state(k).reshape(self.basis.x_max + 1, self.params.two_j + 1)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude coefficient of each column positive (first on ties)."""
    lead = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[lead, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eigh(matrix: SymmetricMatrix) -> EigenSolution:
    """Full decomposition of a symmetric Hamiltonian.

    Deterministic for identical input; raises numpy.linalg.LinAlgError if the
    iterative phase fails to converge, ValueError on non-finite or
    non-symmetric input.
    """
    entries = matrix.entries
    if not np.isfinite(entries).all():
        raise ValueError("matrix contains non-finite entries")
    if not np.array_equal(entries, entries.T):
        raise ValueError("matrix is not exactly symmetric")
    energies, vectors = np.linalg.eigh(entries)
    vectors = _fix_signs(vectors)
    energies.setflags(write=False)
    vectors.setflags(write=False)
    return EigenSolution(
        params=matrix.params, basis=matrix.basis, energies=energies, coefficients=vectors
    )


def eigenvalues_only(matrix: SymmetricMatrix) -> np.ndarray:
    """Ascending eigenvalues without eigenvectors (cheaper; same backend)."""
    entries = matrix.entries
    if not np.isfinite(entries).all():
        raise ValueError("matrix contains non-finite entries")
    values = np.linalg.eigvalsh(entries)
    values.setflags(write=False)
    return values


def residual(matrix: SymmetricMatrix, solution: EigenSolution) -> float:
    """max_k ||H v_k - E_k v_k||_2 / max(1, ||H||_F)."""
    entries = matrix.entries
    if entries.shape[0] != solution.dimension:
        raise ValueError(
            f"dimension mismatch: matrix {entries.shape[0]}, solution {solution.dimension}"
        )
    defect = entries @ solution.coefficients - solution.coefficients * solution.energies
    worst = np.sqrt((defect * defect).sum(axis=0).max())
    return float(worst / max(1.0, np.linalg.norm(entries)))
