"""Convergence analysis across basis truncations.

Probability profiles over boson layers, per-state wave-function precision
(top-layer weight), energy differences between consecutive truncations,
converged-state counting, minimal-truncation search, and ordinary
least-squares fits in log10 space.

Two readings of the wave-function precision coexist deliberately:

* `delta_p(solution, k)` — the weight of the topmost retained layer of a
  single run; needs one diagonalization and is the library's per-state
  criterion.
* `next_layer_weights(params, kind, x_max)` — the weight of layer x_max+1
  taken from the run truncated at x_max+1, i.e. the probability that spills
  just past the layers a run at x_max would keep. Converged-state counting
  (`convergence_count_grid`) uses this reading together with
  `converged_prefix`; that combination is what the count-grid tables use.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np

from .build import solve, spectrum
from .eigensolver import EigenSolution
from .model import (
    DEFAULT_DIMENSION_CAP,
    BasisKind,
    BasisSpec,
    ModelParams,
    make_params,
)

Criterion = Literal["delta_e", "delta_p"]

DEFAULT_SEARCH_CAP = 200

# Free-space gap threshold multiplier for flagging label swaps near degeneracies.
_DEGENERACY_FACTOR = 10.0


@dataclass(frozen=True)
class ProbabilityProfile:
    """P_{k,x} = sum_m |C^k_{m,x}|^2 over boson layers x = 0..x_max."""

    k: int
    x_values: np.ndarray
    p: np.ndarray


def probability_profile(solution: EigenSolution, k: int) -> ProbabilityProfile:
    """Boson-layer probability distribution of state k (k=1 is the ground state)."""
    table = solution.coefficient_table(k)
    p = (table * table).sum(axis=1)
    p.setflags(write=False)
    return ProbabilityProfile(k=k, x_values=np.arange(table.shape[0]), p=p)


def top_layer_weights(solution: EigenSolution) -> np.ndarray:
    """sum_m |C^k_{m,x_top}|^2 for every state k, in ascending-energy order."""
    spin_dim = solution.params.two_j + 1
    top = solution.coefficients[-spin_dim:, :]
    return (top * top).sum(axis=0)


def delta_p(solution: EigenSolution, k: int) -> float:
    """Wave-function precision of state k: weight of the topmost retained layer."""
    if not 1 <= k <= solution.dimension:
        raise ValueError(f"k must be in 1..{solution.dimension}, got {k!r}")
    return float(top_layer_weights(solution)[k - 1])


def next_layer_weights(
    params: ModelParams,
    kind: BasisKind,
    x_max: int,
    cap: int = DEFAULT_DIMENSION_CAP,
) -> np.ndarray:
    """Per-state weight of boson layer x_max+1, from the run truncated at x_max+1.

    Estimates the probability a run truncated at x_max misses; one
    diagonalization, one truncation value.
    """
    enlarged = solve(params, BasisSpec(kind=kind, x_max=x_max + 1), cap=cap)
    return top_layer_weights(enlarged)


def count_converged(solution: EigenSolution, epsilon: float) -> int:
    """Number of states k with delta_p(solution, k) < epsilon."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon!r}")
    return int((top_layer_weights(solution) < epsilon).sum())


def converged_prefix(values: np.ndarray, epsilon: float) -> int:
    """Length of the initial run of values below epsilon (first failure stops the count)."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon!r}")
    failing = np.nonzero(np.asarray(values) >= epsilon)[0]
    return int(failing[0]) if failing.size else len(values)


def delta_e_values(
    params: ModelParams,
    kind: BasisKind,
    x_max: int,
    cap: int = DEFAULT_DIMENSION_CAP,
) -> np.ndarray:
    """|E_k(x_max) - E_k(x_max-1)| for every k shared by the two runs.

    States are matched by sorted index; the difference is absolute, in the
    caller's energy units.
    """
    if x_max < 1:
        raise ValueError(f"x_max must be >= 1 for an energy difference, got {x_max!r}")
    large = spectrum(params, BasisSpec(kind=kind, x_max=x_max), cap=cap)
    small = spectrum(params, BasisSpec(kind=kind, x_max=x_max - 1), cap=cap)
    return np.abs(large[: small.size] - small)


def delta_e(
    params: ModelParams,
    kind: BasisKind,
    x_max: int,
    k: int,
    cap: int = DEFAULT_DIMENSION_CAP,
) -> float:
    """Energy change of state k between truncations x_max-1 and x_max."""
    values = delta_e_values(params, kind, x_max, cap=cap)
    if not 1 <= k <= values.size:
        raise ValueError(f"k must be in 1..{values.size}, got {k!r}")
    return float(values[k - 1])


@dataclass(frozen=True)
class FitResult:
    """Ordinary least squares y = intercept + slope*x."""

    intercept: float
    slope: float
    rms_residual: float
    n_points: int


def linear_fit(xs: Sequence[float], ys: Sequence[float]) -> FitResult:
    """OLS minimizing sum (y - a - b*x)^2; raises on fewer than 2 points or constant xs."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError(f"xs and ys must be matching 1-D arrays, got {xs.shape} and {ys.shape}")
    if xs.size < 2:
        raise ValueError(f"need at least 2 points, got {xs.size}")
    dx = xs - xs.mean()
    denom = (dx * dx).sum()
    if denom == 0.0:
        raise ValueError("xs are degenerate (all equal)")
    slope = (dx * (ys - ys.mean())).sum() / denom
    intercept = ys.mean() - slope * xs.mean()
    rms = math.sqrt(float(np.mean((ys - intercept - slope * xs) ** 2)))
    return FitResult(intercept=float(intercept), slope=float(slope), rms_residual=rms, n_points=xs.size)


@dataclass(frozen=True)
class MinTruncationResult:
    """Outcome of a minimal-truncation scan; not converged by the cap is a result, not an error."""

    converged: bool
    x_max: Optional[int]
    trace: tuple[tuple[int, float], ...]
    criterion: Criterion
    epsilon: float
    k: int


def find_min_truncation(
    params: ModelParams,
    kind: BasisKind,
    k: int,
    epsilon: float,
    criterion: Criterion = "delta_e",
    start: Optional[int] = None,
    stride: int = 1,
    search_cap: int = DEFAULT_SEARCH_CAP,
    cap: int = DEFAULT_DIMENSION_CAP,
) -> MinTruncationResult:
    """Smallest truncation at which state k meets the criterion, by linear scan.

    Scans with the given stride from `start` (default: the smallest truncation
    at which the criterion is defined for state k), then refines by step 1
    inside the last stride window. No bisection: the criterion is not
    guaranteed monotone for excited states.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon!r}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k!r}")
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride!r}")
    if criterion not in ("delta_e", "delta_p"):
        raise ValueError(f"criterion must be 'delta_e' or 'delta_p', got {criterion!r}")

    spin_dim = params.two_j + 1
    if criterion == "delta_p":
        minimum = max(0, math.ceil(k / spin_dim) - 1)

        def value(x: int) -> float:
            sol = solve(params, BasisSpec(kind=kind, x_max=x), cap=cap)
            return float(top_layer_weights(sol)[k - 1])

    else:
        minimum = max(1, math.ceil(k / spin_dim))
        spectra: dict[int, np.ndarray] = {}

        def _spectrum(x: int) -> np.ndarray:
            if x not in spectra:
                spectra[x] = spectrum(params, BasisSpec(kind=kind, x_max=x), cap=cap)
            return spectra[x]

        def value(x: int) -> float:
            return float(abs(_spectrum(x)[k - 1] - _spectrum(x - 1)[k - 1]))

    first = minimum if start is None else max(start, minimum)
    trace: list[tuple[int, float]] = []

    hit: Optional[int] = None
    previous_probe = None
    for x in range(first, search_cap + 1, stride):
        val = value(x)
        trace.append((x, val))
        if val < epsilon:
            hit = x
            break
        previous_probe = x

    if hit is None:
        return MinTruncationResult(
            converged=False, x_max=None, trace=tuple(trace),
            criterion=criterion, epsilon=epsilon, k=k,
        )

    best = hit
    if stride > 1 and previous_probe is not None:
        for x in range(previous_probe + 1, hit):
            val = value(x)
            trace.append((x, val))
            if val < epsilon:
                best = x
                break

    return MinTruncationResult(
        converged=True, x_max=best, trace=tuple(trace),
        criterion=criterion, epsilon=epsilon, k=k,
    )


@dataclass(frozen=True)
class StateRow:
    """Per-state convergence entry; delta_e is None when only one run was requested."""

    k: int
    energy: float
    delta_p: float
    delta_e: Optional[float]
    degenerate_suspect: Optional[bool]


@dataclass(frozen=True)
class ConvergenceReport:
    params: ModelParams
    basis: BasisSpec
    rows: tuple[StateRow, ...]
    tolerances: tuple[float, ...]
    counts: dict[float, int]
    fit: Optional[FitResult] = None


def convergence_report(
    params: ModelParams,
    kind: BasisKind,
    x_max: int,
    tolerances: Sequence[float] = (1e-6, 1e-4),
    kmax: Optional[int] = None,
    with_delta_e: bool = True,
    cap: int = DEFAULT_DIMENSION_CAP,
    fit: Optional[FitResult] = None,
) -> ConvergenceReport:
    """Per-state table (k, E, delta_p, delta_e) with counts under each tolerance.

    Near-degenerate pairs, where |E_k - E_{k+-1}| < 10*delta_e_k, are flagged
    degenerate-suspect instead of guessing a label assignment across runs.
    """
    for eps in tolerances:
        if eps <= 0:
            raise ValueError(f"tolerances must be > 0, got {eps!r}")
    solution = solve(params, BasisSpec(kind=kind, x_max=x_max), cap=cap)
    weights = top_layer_weights(solution)
    energies = solution.energies

    diffs = None
    if with_delta_e and x_max >= 1:
        diffs = delta_e_values(params, kind, x_max, cap=cap)

    n_rows = solution.dimension if kmax is None else min(kmax, solution.dimension)
    if n_rows < 1:
        raise ValueError(f"state selection is empty (kmax={kmax!r})")

    gaps = np.full(energies.size, np.inf)
    if energies.size > 1:
        forward = np.diff(energies)
        gaps[:-1] = forward
        gaps[1:] = np.minimum(gaps[1:], forward)

    rows = []
    for i in range(n_rows):
        de = float(diffs[i]) if diffs is not None and i < diffs.size else None
        suspect = bool(gaps[i] < _DEGENERACY_FACTOR * de) if de is not None else None
        rows.append(
            StateRow(
                k=i + 1,
                energy=float(energies[i]),
                delta_p=float(weights[i]),
                delta_e=de,
                degenerate_suspect=suspect,
            )
        )

    counts = {float(eps): int((weights[:n_rows] < eps).sum()) for eps in tolerances}
    return ConvergenceReport(
        params=params,
        basis=solution.basis,
        rows=tuple(rows),
        tolerances=tuple(float(e) for e in tolerances),
        counts=counts,
        fit=fit,
    )


@dataclass(frozen=True)
class CountRow:
    """Converged-state counts for one (j, x_max) cell, per basis and tolerance."""

    j: float
    x_max: int
    counts: dict[tuple[str, float], int]


def convergence_count_grid(
    j_values: Sequence[float],
    x_values: Sequence[int],
    tolerances: Sequence[float] = (1e-6, 1e-4),
    omega: float = 1.0,
    omega0: float = 1.0,
    gamma: float = 0.5,
    jobs: int = 1,
    cap: int = DEFAULT_DIMENSION_CAP,
) -> list[CountRow]:
    """Converged-state counts over a (j, truncation) grid for both bases.

    For each cell the count is the consecutive prefix of states (from the
    ground state) whose layer-(x_max+1) weight, read from the run at x_max+1,
    is below the tolerance.
    """
    for eps in tolerances:
        if eps <= 0:
            raise ValueError(f"tolerances must be > 0, got {eps!r}")
    if not j_values or not x_values:
        raise ValueError("j_values and x_values must be non-empty")

    tasks = [
        (j, x, kind)
        for j in j_values
        for x in x_values
        for kind in (BasisKind.FOCK, BasisKind.COHERENT)
    ]

    def run(task: tuple[float, int, BasisKind]) -> dict[float, int]:
        j, x, kind = task
        params = make_params(omega, omega0, gamma, j)
        weights = next_layer_weights(params, kind, x, cap=cap)
        return {float(eps): converged_prefix(weights, eps) for eps in tolerances}

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(task) for task in tasks]

    by_task = dict(zip(tasks, results))
    rows = []
    for j in j_values:
        for x in x_values:
            counts = {}
            for kind in (BasisKind.FOCK, BasisKind.COHERENT):
                for eps in tolerances:
                    counts[(kind.value, float(eps))] = by_task[(j, x, kind)][float(eps)]
            rows.append(CountRow(j=float(j), x_max=int(x), counts=counts))
    return rows


def truncation_precision_points(
    params: ModelParams,
    kind: BasisKind,
    x_values: Sequence[int],
    k: int = 1,
    cap: int = DEFAULT_DIMENSION_CAP,
) -> tuple[np.ndarray, np.ndarray]:
    """Points (x_max, -log10 delta_p_k) for fitting precision growth with truncation.

    Truncations where the weight underflows to exactly zero are skipped (their
    log is undefined).
    """
    xs, ys = [], []
    for x in x_values:
        sol = solve(params, BasisSpec(kind=kind, x_max=int(x)), cap=cap)
        weight = delta_p(sol, k)
        if weight > 0.0:
            xs.append(float(x))
            ys.append(-math.log10(weight))
    return np.asarray(xs), np.asarray(ys)


def energy_precision_points(
    params: ModelParams,
    kind: BasisKind,
    x_max: int,
    epsilon: float = 1e-4,
    kmax: int = 250,
    cap: int = DEFAULT_DIMENSION_CAP,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Points (log10 delta_e_k, -log10 delta_p_k) for the first kmax states with delta_e < epsilon.

    Returns (xs, ys, ks). States whose delta_e or delta_p is exactly zero at
    the floating-point floor are excluded from the log-log point set.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon!r}")
    if kmax < 1:
        raise ValueError(f"kmax must be >= 1, got {kmax!r}")
    diffs = delta_e_values(params, kind, x_max, cap=cap)
    weights = top_layer_weights(solve(params, BasisSpec(kind=kind, x_max=x_max), cap=cap))
    qualifying = np.nonzero(diffs < epsilon)[0][:kmax]
    usable = qualifying[(diffs[qualifying] > 0.0) & (weights[qualifying] > 0.0)]
    xs = np.log10(diffs[usable])
    ys = -np.log10(weights[usable])
    return xs, ys, usable + 1
