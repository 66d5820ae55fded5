import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dicke.build import solve
from dicke.convergence import (
    convergence_count_grid,
    convergence_report,
    converged_prefix,
    count_converged,
    delta_e,
    delta_e_values,
    delta_p,
    energy_precision_points,
    find_min_truncation,
    linear_fit,
    next_layer_weights,
    probability_profile,
    top_layer_weights,
    truncation_precision_points,
)
from dicke.model import BasisKind, BasisSpec, make_params


def fock_solution(omega0=1.0, gamma=0.5, j=2, x_max=8):
    p = make_params(1.0, omega0, gamma, j)
    return p, solve(p, BasisSpec(BasisKind.FOCK, x_max))


class TestProbabilityProfile:
    def test_decoupled_ground_is_vacuum(self):
        _, solution = fock_solution(omega0=0.77, gamma=0.0)
        profile = probability_profile(solution, 1)
        assert profile.p[0] == pytest.approx(1.0, abs=1e-14)
        assert np.all(profile.p[1:] < 1e-14)

    def test_normalization_every_state(self):
        _, solution = fock_solution(gamma=0.9)
        for k in range(1, solution.dimension + 1):
            profile = probability_profile(solution, k)
            assert abs(profile.p.sum() - 1.0) <= 1e-12
            assert np.all(profile.p >= 0.0)

    def test_superradiant_shapes(self):
        p = make_params(1.0, 1.0, 1.0, 10)
        fock = solve(p, BasisSpec(BasisKind.FOCK, 50))
        peak = int(np.argmax(probability_profile(fock, 1).p))
        assert peak > 0
        coherent = solve(p, BasisSpec(BasisKind.COHERENT, 8))
        assert int(np.argmax(probability_profile(coherent, 1).p)) == 0

    def test_k_out_of_range(self):
        _, solution = fock_solution()
        with pytest.raises(ValueError):
            probability_profile(solution, 0)


class TestDeltaP:
    def test_decoupled_states_have_zero_weight_off_top(self):
        p, solution = fock_solution(omega0=0.77, gamma=0.0, j=2, x_max=6)
        assert delta_p(solution, 1) == 0.0
        weights = top_layer_weights(solution)
        # exactly one layer per state: only top-layer states score 1
        assert int((weights < 1e-15).sum()) == 6 * (p.two_j + 1)

    def test_bounds(self):
        _, solution = fock_solution(gamma=1.1)
        weights = top_layer_weights(solution)
        assert np.all(weights >= 0.0)
        assert np.all(weights <= 1.0 + 1e-12)

    def test_k_out_of_range(self):
        _, solution = fock_solution()
        with pytest.raises(ValueError):
            delta_p(solution, solution.dimension + 1)


class TestCounts:
    def test_count_converged_tolerance_above_one_counts_all(self):
        _, solution = fock_solution(gamma=0.8)
        assert count_converged(solution, 1.5) == solution.dimension

    def test_count_matches_weights(self):
        _, solution = fock_solution(gamma=0.8)
        weights = top_layer_weights(solution)
        for eps in (1e-8, 1e-4, 1e-2):
            assert count_converged(solution, eps) == int((weights < eps).sum())

    def test_converged_prefix(self):
        values = np.array([1e-9, 1e-7, 0.5, 1e-9])
        assert converged_prefix(values, 1e-6) == 2
        assert converged_prefix(values, 1.0) == 4
        assert converged_prefix(np.array([0.5]), 1e-6) == 0

    def test_invalid_epsilon(self):
        _, solution = fock_solution()
        with pytest.raises(ValueError):
            count_converged(solution, 0.0)
        with pytest.raises(ValueError):
            converged_prefix(np.array([0.1]), -1.0)

    def test_next_layer_weights_consistency(self):
        p = make_params(1.0, 1.0, 0.5, 2)
        manual = top_layer_weights(solve(p, BasisSpec(BasisKind.COHERENT, 7)))
        assert np.array_equal(next_layer_weights(p, BasisKind.COHERENT, 6), manual)

    def test_reference_first_grid_row(self):
        rows = convergence_count_grid([10.0], [10], tolerances=(1e-6, 1e-4))
        counts = rows[0].counts
        assert counts[("fock", 1e-6)] == 1
        assert counts[("coherent", 1e-6)] == 18
        assert counts[("fock", 1e-4)] == 4
        assert counts[("coherent", 1e-4)] == 37

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            convergence_count_grid([], [10])
        with pytest.raises(ValueError):
            convergence_count_grid([1.0], [4], tolerances=(0.0,))

    def test_grid_jobs_equivalence(self):
        serial = convergence_count_grid([1.0, 2.0], [3, 5], tolerances=(1e-4,))
        threaded = convergence_count_grid([1.0, 2.0], [3, 5], tolerances=(1e-4,), jobs=4)
        assert serial == threaded


class TestDeltaE:
    def test_decoupled_low_states_are_exact(self):
        # resonance, j=1: layers up to x add levels starting at x-j, so the
        # lowest 9 levels of the x=4 and x=3 runs coincide
        p = make_params(1.0, 1.0, 0.0, 1)
        values = delta_e_values(p, BasisKind.FOCK, 4)
        assert np.all(values[:9] <= 1e-12)

    def test_single_state_accessor(self):
        p = make_params(1.0, 1.0, 0.7, 1.5)
        values = delta_e_values(p, BasisKind.COHERENT, 6)
        assert delta_e(p, BasisKind.COHERENT, 6, 3) == values[2]
        with pytest.raises(ValueError):
            delta_e(p, BasisKind.COHERENT, 6, values.size + 1)
        with pytest.raises(ValueError):
            delta_e_values(p, BasisKind.COHERENT, 0)

    def test_ground_trace_non_increasing(self):
        p = make_params(1.0, 1.0, 0.8, 2)
        trail = [delta_e(p, BasisKind.FOCK, x, 1) for x in range(2, 13)]
        for earlier, later in zip(trail, trail[1:]):
            assert later <= earlier + 1e-13


class TestMinTruncation:
    def test_decoupled_delta_p(self):
        p = make_params(1.0, 1.0, 0.0, 1)
        result = find_min_truncation(p, BasisKind.FOCK, 1, 1e-9, criterion="delta_p")
        assert result.converged and result.x_max == 1
        assert result.trace[0] == (0, 1.0)
        assert result.trace[-1][1] < 1e-9

    def test_decoupled_delta_e(self):
        p = make_params(1.0, 1.0, 0.0, 1)
        result = find_min_truncation(p, BasisKind.FOCK, 1, 1e-9, criterion="delta_e")
        assert result.converged and result.x_max == 1

    def test_stride_refinement(self):
        p = make_params(1.0, 1.0, 0.0, 1)
        result = find_min_truncation(
            p, BasisKind.FOCK, 1, 1e-9, criterion="delta_p", stride=4
        )
        assert result.converged and result.x_max == 1
        probed = [x for x, _ in result.trace]
        assert probed[:2] == [0, 4]

    def test_cap_exhaustion_is_a_result(self):
        p = make_params(1.0, 1.0, 0.9, 1)
        result = find_min_truncation(
            p, BasisKind.FOCK, 1, 1e-300, criterion="delta_p", search_cap=4
        )
        assert not result.converged
        assert result.x_max is None
        assert len(result.trace) == 5

    def test_excited_state_start(self):
        # k=7 needs at least three layers at 2j+1 = 3
        p = make_params(1.0, 1.0, 0.4, 1)
        result = find_min_truncation(p, BasisKind.FOCK, 7, 1e-5, criterion="delta_e")
        assert result.converged
        assert result.trace[0][0] >= 3

    def test_validation(self):
        p = make_params(1.0, 1.0, 0.4, 1)
        with pytest.raises(ValueError):
            find_min_truncation(p, BasisKind.FOCK, 0, 1e-6)
        with pytest.raises(ValueError):
            find_min_truncation(p, BasisKind.FOCK, 1, -1e-6)
        with pytest.raises(ValueError):
            find_min_truncation(p, BasisKind.FOCK, 1, 1e-6, criterion="bogus")


class TestLinearFit:
    def test_exact_line(self):
        fit = linear_fit([0.0, 1.0, 2.0, 3.0], [1.0, 3.0, 5.0, 7.0])
        assert fit.intercept == pytest.approx(1.0, abs=1e-12)
        assert fit.slope == pytest.approx(2.0, abs=1e-12)
        assert fit.rms_residual == pytest.approx(0.0, abs=1e-12)
        assert fit.n_points == 4

    @given(
        intercept=st.floats(-5, 5),
        slope=st.floats(-5, 5),
    )
    @settings(max_examples=30, deadline=None)
    def test_recovers_noiseless_parameters(self, intercept, slope):
        xs = np.linspace(0.0, 4.0, 9)
        fit = linear_fit(xs, intercept + slope * xs)
        assert fit.intercept == pytest.approx(intercept, abs=1e-9)
        assert fit.slope == pytest.approx(slope, abs=1e-9)

    def test_degenerate_inputs(self):
        with pytest.raises(ValueError):
            linear_fit([1.0], [2.0])
        with pytest.raises(ValueError):
            linear_fit([2.0, 2.0], [1.0, 3.0])
        with pytest.raises(ValueError):
            linear_fit([1.0, 2.0], [1.0, 2.0, 3.0])


class TestReport:
    def test_counts_match_rows(self):
        p = make_params(1.0, 1.0, 0.7, 1.5)
        report = convergence_report(p, BasisKind.COHERENT, 6, tolerances=(1e-6, 1e-3))
        for eps, count in report.counts.items():
            assert count == sum(1 for r in report.rows if r.delta_p < eps)

    def test_degenerate_suspect_matches_rule(self):
        p = make_params(1.0, 1.0, 1.3, 2)
        report = convergence_report(p, BasisKind.FOCK, 4)
        energies = [r.energy for r in report.rows]
        for i, row in enumerate(report.rows):
            if row.delta_e is None:
                # states beyond the smaller run carry no energy difference
                assert row.degenerate_suspect is None
                continue
            gap = math.inf
            if i > 0:
                gap = min(gap, energies[i] - energies[i - 1])
            if i + 1 < len(energies):
                gap = min(gap, energies[i + 1] - energies[i])
            assert row.degenerate_suspect == (gap < 10.0 * row.delta_e)

    def test_superradiant_doublets_are_flagged(self):
        p = make_params(1.0, 1.0, 1.3, 2)
        report = convergence_report(p, BasisKind.FOCK, 4)
        assert any(r.degenerate_suspect for r in report.rows)

    def test_kmax_limits_rows(self):
        p = make_params(1.0, 1.0, 0.7, 1)
        report = convergence_report(p, BasisKind.FOCK, 5, kmax=4)
        assert [r.k for r in report.rows] == [1, 2, 3, 4]

    def test_empty_selection_rejected(self):
        p = make_params(1.0, 1.0, 0.7, 1)
        with pytest.raises(ValueError):
            convergence_report(p, BasisKind.FOCK, 5, kmax=0)

    def test_no_delta_e_mode(self):
        p = make_params(1.0, 1.0, 0.7, 1)
        report = convergence_report(p, BasisKind.FOCK, 5, with_delta_e=False)
        assert all(r.delta_e is None and r.degenerate_suspect is None for r in report.rows)


class TestFitPoints:
    def test_truncation_points_match_delta_p(self):
        p = make_params(1.0, 1.0, 0.6, 1.5)
        xs, ys = truncation_precision_points(p, BasisKind.COHERENT, range(2, 7))
        assert list(xs) == [2.0, 3.0, 4.0, 5.0, 6.0]
        weight = delta_p(solve(p, BasisSpec(BasisKind.COHERENT, 4)), 1)
        assert ys[2] == pytest.approx(-math.log10(weight), abs=1e-12)

    def test_energy_points_filtered_and_ordered(self):
        p = make_params(1.0, 1.0, 0.6, 2)
        xs, ys, ks = energy_precision_points(p, BasisKind.COHERENT, 8, epsilon=1e-2, kmax=10)
        assert xs.size == ys.size == ks.size
        assert xs.size <= 10
        assert np.all(np.diff(ks) > 0)
        assert np.all(xs < -2.0)  # log10 of values below 1e-2

    def test_energy_points_validation(self):
        p = make_params(1.0, 1.0, 0.6, 2)
        with pytest.raises(ValueError):
            energy_precision_points(p, BasisKind.COHERENT, 8, epsilon=-1.0)
        with pytest.raises(ValueError):
            energy_precision_points(p, BasisKind.COHERENT, 8, kmax=0)
