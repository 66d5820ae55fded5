"""Dicke Hamiltonian in the extended bosonic coherent basis |N; j, m>.

Rotating the pseudo-spin about y turns the Hamiltonian into

    H' = omega*a'a + omega0*Jx - (2*gamma/sqrt(N_atoms))*(a + a')*Jz

with Jz diagonal. For each spin projection m the boson part completes the
square, omega*(A_m'A_m - G^2 m^2) with A_m = a - G*m and G = 2*gamma/(omega*sqrt(N_atoms)),
so the basis layer N at projection m is the N-th number state of A_m, i.e.
the displaced state D(G*m)|N>. The coupling-dominated part is then diagonal,
which is what makes this basis efficient deep in the superradiant phase.

All displacements are real, so every matrix element is real and one
(N_max+1)^2 overlap table at displacement +G serves the whole matrix.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg

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


def displacement_unit(params: ModelParams) -> float:
    """Dimensionless displacement per unit spin projection, G = 2*gamma/(omega*sqrt(N_atoms))."""
    return 2.0 * params.gamma / (params.omega * math.sqrt(params.n_atoms))


def _diagonal_overlaps(alpha: float, offset: int, count: int) -> np.ndarray:
    """Overlaps f_k = <k|D(alpha)|k+offset> for k = 0..count-1, offset >= 0.

    Three-term upward recurrence in k at fixed offset, seeded by the closed
    form at k=0; the factorial ratio enters through log-gamma so nothing
    overflows. All values are matrix elements of a unitary, hence bounded by 1.
    """
    x = alpha * alpha
    out = np.empty(count)
    # f_0 = e^{-x/2} (-alpha)^offset / sqrt(offset!)
    if offset == 0:
        f = math.exp(-0.5 * x)
    else:
        f = math.exp(-0.5 * x + offset * math.log(abs(alpha)) - 0.5 * math.lgamma(offset + 1))
        if alpha > 0 and offset % 2:
            f = -f
    f_prev = 0.0
    out[0] = f
    for k in range(count - 1):
        f_next = (
            (2 * k + offset + 1 - x) * f - math.sqrt(k * (k + offset)) * f_prev
        ) / math.sqrt((k + 1) * (k + 1 + offset))
        f_prev, f = f, f_next
        out[k + 1] = f
    return out


def displaced_overlap(n_row: int, n_col: int, alpha: float) -> float:
    """Displaced-Fock matrix element <n_row|D(alpha)|n_col> for real alpha.

    For n_col >= n_row this is e^{-a^2/2} sqrt(n_row!/n_col!) (-a)^(n_col-n_row)
    L_{n_row}^{(n_col-n_row)}(a^2); the other triangle follows from the real
    transpose rule <n'|D(a)|n> = <n|D(-a)|n'> = (-1)^(n-n') <n|D(a)|n'>.
    """
    if n_row < 0 or n_col < 0:
        raise ValueError(f"layer indices must be >= 0, got ({n_row!r}, {n_col!r})")
    if not math.isfinite(alpha):
        raise ValueError(f"alpha must be finite, got {alpha!r}")
    if n_row > n_col:
        flip = -1.0 if (n_row - n_col) % 2 else 1.0
        return flip * displaced_overlap(n_col, n_row, alpha)
    offset = n_col - n_row
    if alpha == 0.0:
        return 1.0 if offset == 0 else 0.0
    return float(_diagonal_overlaps(alpha, offset, n_row + 1)[n_row])


def overlap_kernel(alpha: float, n_max: int) -> np.ndarray:
    """Table K[N', N] = <N'|D(alpha)|N> for 0 <= N', N <= n_max.

    The upper triangle (N >= N') is filled by the diagonal recurrence; the
    lower follows from K[a, b] = (-1)^(a-b) K[b, a], which holds exactly for
    real displacements.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max!r}")
    size = n_max + 1
    if alpha == 0.0:
        return np.eye(size)
    kernel = np.zeros((size, size))
    rows = np.arange(size)
    for offset in range(size):
        diag = _diagonal_overlaps(alpha, offset, size - offset)
        kernel[rows[: size - offset], rows[: size - offset] + offset] = diag
    lower = kernel.T * np.where((rows[:, None] - rows[None, :]) % 2 == 0, 1.0, -1.0)
    kernel = np.where(rows[:, None] > rows[None, :], lower, kernel)
    return kernel


def build_coherent_hamiltonian(
    params: ModelParams, n_max: int, cap: int = DEFAULT_DIMENSION_CAP
) -> SymmetricMatrix:
    """Assemble the dense (N_max+1)(2j+1) Hamiltonian, flat layout N*(2j+1)+(m+j).

    Diagonal in m: omega*N - omega*G^2*m^2. Between m and m+1 the spin-flip
    element (omega0/2)*sqrt(j(j+1)-m(m+1)) carries the displaced-layer overlap
    <N'|D(-G)|N> = K[N, N'], so the whole coupling block is
    kron(K^T, L) + kron(K, L^T) with L the scaled lowering pattern — exactly
    symmetric because transposition only rearranges identical float products.
    """
    if not isinstance(n_max, (int, np.integer)) or n_max < 0:
        raise ValueError(f"N_max must be a non-negative integer, got {n_max!r}")
    check_dimension(params.two_j, n_max, cap)

    unit = displacement_unit(params)
    m = spin_z_values(params.two_j)
    jp = spin_raising_matrix(params.two_j)
    flip_up = 0.5 * params.omega0 * jp  # element [m+1, m]

    layers = np.arange(n_max + 1, dtype=float)
    eye_boson = np.eye(n_max + 1)
    eye_spin = np.eye(params.two_j + 1)
    kernel = overlap_kernel(unit, n_max)

    entries = (
        params.omega * np.kron(np.diag(layers), eye_spin)
        - params.omega * unit * unit * np.kron(eye_boson, np.diag(m * m))
        + np.kron(kernel.T, flip_up)
        + np.kron(kernel, flip_up.T)
    )
    entries.setflags(write=False)
    return SymmetricMatrix(
        params=params,
        basis=BasisSpec(kind=BasisKind.COHERENT, x_max=int(n_max)),
        entries=entries,
    )


def spin_rotation_matrix(two_j: int) -> np.ndarray:
    """Real orthogonal matrix mapping rotated-frame spin components to the lab frame.

    The matrix of exp(i*pi*Jy/2) in the |j,m> basis, real because
    i*Jy = (J+ - J-)/2. Its transpose diagonalizes Jx: W @ Jx @ W.T = diag(m).
    """
    jp = spin_raising_matrix(two_j)
    return scipy.linalg.expm((math.pi / 4.0) * (jp - jp.T))


def coherent_to_fock(
    eigvec: np.ndarray, params: ModelParams, n_max: int, n_cut: int
) -> np.ndarray:
    """Expand a coherent-basis eigenvector in the lab-frame Fock basis.

    Undoes the displacement (per spin projection) and the spin rotation, up to
    photon cutoff n_cut. Returns a table of shape (n_cut+1, 2j+1) indexed by
    [n, m+j]; its squared norm is <= 1, with the deficit the probability
    leaked past n_cut.
    """
    if n_cut < n_max:
        raise ValueError(f"n_cut must be >= N_max, got n_cut={n_cut!r} < {n_max!r}")
    eigvec = np.asarray(eigvec, dtype=float)
    dim = (n_max + 1) * (params.two_j + 1)
    if eigvec.shape != (dim,):
        raise ValueError(f"eigvec has shape {eigvec.shape}, expected ({dim},)")

    unit = displacement_unit(params)
    m = spin_z_values(params.two_j)
    coeff = eigvec.reshape(n_max + 1, params.two_j + 1)

    displaced = np.empty((n_cut + 1, params.two_j + 1))
    for spin_pos in range(params.two_j + 1):
        block = overlap_kernel(unit * m[spin_pos], n_cut)[:, : n_max + 1]
        displaced[:, spin_pos] = block @ coeff[:, spin_pos]

    rotation = spin_rotation_matrix(params.two_j)
    return displaced @ rotation.T
