"""Physical parameters, quantum-number bookkeeping, and pseudo-spin matrix elements.

Half-integer quantum numbers are stored exactly as doubled integers (2j, 2m)
so that no floating-point equality on quantum numbers is ever needed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

# Dense matrices above this dimension are refused by the builders unless the
# caller raises the cap explicitly.
DEFAULT_DIMENSION_CAP = 30_000

_HALF_INT_TOL = 1e-9


class DimensionCapError(RuntimeError):
    """Requested matrix dimension exceeds the configured cap."""


class BasisKind(str, enum.Enum):
    FOCK = "fock"
    COHERENT = "coherent"


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


def _doubled(name: str, value: float) -> int:
    """Validate that `value` is a multiple of 1/2 and return 2*value as int."""
    value = _require_finite(name, value)
    doubled = round(2.0 * value)
    if abs(2.0 * value - doubled) > _HALF_INT_TOL:
        raise ValueError(f"{name} must be an integer multiple of 1/2, got {value!r}")
    return int(doubled)


@dataclass(frozen=True)
class ModelParams:
    """Dicke-model parameters: boson frequency, atomic splitting, coupling, spin length.

    The pseudo-spin length j is stored as `two_j = 2j`; the number of atoms is
    2j (symmetric atomic subspace), and the critical coupling
    gamma_c = sqrt(omega*omega0)/2 is derived, never user-supplied.
    """

    omega: float
    omega0: float
    gamma: float
    two_j: int

    @property
    def j(self) -> float:
        return self.two_j / 2.0

    @property
    def n_atoms(self) -> int:
        return self.two_j

    @property
    def gamma_c(self) -> float:
        return math.sqrt(self.omega * self.omega0) / 2.0


def make_params(omega: float, omega0: float, gamma: float, j: float) -> ModelParams:
    """Validate and build ModelParams.

    Raises ValueError naming the offending field for non-finite, negative,
    or non-half-integer inputs.
    """
    omega = _require_finite("omega", omega)
    omega0 = _require_finite("omega0", omega0)
    gamma = _require_finite("gamma", gamma)
    if omega <= 0:
        raise ValueError(f"omega must be > 0, got {omega!r}")
    if omega0 < 0:
        raise ValueError(f"omega0 must be >= 0, got {omega0!r}")
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma!r}")
    two_j = _doubled("j", j)
    if two_j <= 0:
        raise ValueError(f"j must be > 0, got {j!r}")
    return ModelParams(omega=omega, omega0=omega0, gamma=gamma, two_j=two_j)


@dataclass(frozen=True)
class BasisSpec:
    """Which basis (Fock or coherent) and its boson truncation x_max."""

    kind: BasisKind
    x_max: int

    def __post_init__(self) -> None:
        if not isinstance(self.x_max, (int, np.integer)) or self.x_max < 0:
            raise ValueError(f"x_max must be a non-negative integer, got {self.x_max!r}")

    def dimension(self, two_j: int) -> int:
        return (self.x_max + 1) * (two_j + 1)


def check_dimension(two_j: int, x_max: int, cap: int = DEFAULT_DIMENSION_CAP) -> int:
    """Return the full matrix dimension (x_max+1)(2j+1), enforcing the cap."""
    dim = (x_max + 1) * (two_j + 1)
    if dim > cap:
        raise DimensionCapError(
            f"matrix dimension {dim} = ({x_max}+1)({two_j}+1) exceeds cap {cap}"
        )
    return dim


@dataclass(frozen=True)
class StateIndex:
    """Position of a basis state |x; j, m> in the flat matrix layout.

    flat = x*(2j+1) + (m+j); the boson layer is the slow index.
    """

    x: int
    two_m: int
    flat: int

    @property
    def m(self) -> float:
        return self.two_m / 2.0


def flat_index(x: int, two_m: int, two_j: int) -> int:
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x!r}")
    if abs(two_m) > two_j:
        raise ValueError(f"|m| must not exceed j: 2m={two_m}, 2j={two_j}")
    if (two_m + two_j) % 2 != 0:
        raise ValueError(f"m must differ from j by an integer: 2m={two_m}, 2j={two_j}")
    return x * (two_j + 1) + (two_m + two_j) // 2


def state_index(flat: int, two_j: int) -> StateIndex:
    """Invert flat_index."""
    if flat < 0:
        raise ValueError(f"flat must be >= 0, got {flat!r}")
    x, spin_pos = divmod(flat, two_j + 1)
    return StateIndex(x=x, two_m=2 * spin_pos - two_j, flat=flat)


def basis_states(two_j: int, x_max: int) -> list[StateIndex]:
    """All basis states in flat order."""
    return [state_index(flat, two_j) for flat in range((x_max + 1) * (two_j + 1))]


def raising_coefficient(j: float, m: float) -> float:
    """Matrix element <j,m+1|J+|j,m> = sqrt(j(j+1) - m(m+1)).

    Also equals <j,m|J-|j,m+1>. Zero when m = j.
    """
    two_j = _doubled("j", j)
    two_m = _doubled("m", m)
    if (two_j + two_m) % 2 != 0:
        raise ValueError(f"m must differ from j by an integer: m={m!r}, j={j!r}")
    if abs(two_m) > two_j:
        raise ValueError(f"|m| must not exceed j: m={m!r}, j={j!r}")
    # j(j+1) - m(m+1) = (2j(2j+2) - 2m(2m+2))/4, exact in integers
    quad = two_j * (two_j + 2) - two_m * (two_m + 2)
    return math.sqrt(quad) / 2.0


def parity_sign(x: int, m: float, j: float) -> int:
    """Eigenvalue (-1)^(x+m+j) of the conserved parity exp{i*pi*(a'a + Jz + j)}.

    Used as a Fock-basis eigenstate sanity check; the exponent x+m+j is a
    non-negative integer for any valid basis state.
    """
    two_j = _doubled("j", j)
    two_m = _doubled("m", m)
    if x < 0 or (two_j + two_m) % 2 != 0 or abs(two_m) > two_j:
        raise ValueError(f"invalid state index (x={x!r}, m={m!r}, j={j!r})")
    exponent = x + (two_m + two_j) // 2
    return 1 if exponent % 2 == 0 else -1


def parity_vector(two_j: int, x_max: int) -> np.ndarray:
    """Parity signs (+1/-1) for every basis state, in flat order."""
    spin = np.arange(two_j + 1)  # (m+j) for each spin position
    x = np.arange(x_max + 1)
    exponents = x[:, None] + spin[None, :]
    return np.where(exponents % 2 == 0, 1, -1).reshape(-1)


def spin_z_values(two_j: int) -> np.ndarray:
    """Spin projections m in ascending flat order, -j..j."""
    return np.arange(-two_j, two_j + 1, 2) / 2.0


def spin_raising_matrix(two_j: int) -> np.ndarray:
    """Matrix of J+ in the |j,m> basis (ascending m): J+[m+1, m] = raising coefficient."""
    m = spin_z_values(two_j)
    jp = np.zeros((two_j + 1, two_j + 1))
    j = two_j / 2.0
    jp[np.arange(1, two_j + 1), np.arange(two_j)] = np.sqrt(
        j * (j + 1) - m[:-1] * (m[:-1] + 1)
    )
    return jp


@dataclass(frozen=True)
class SymmetricMatrix:
    """Dense real symmetric Hamiltonian with the parameters it was built from."""

    params: ModelParams
    basis: BasisSpec
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]
