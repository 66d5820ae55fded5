import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dicke.model import (
    BasisKind,
    BasisSpec,
    DimensionCapError,
    StateIndex,
    basis_states,
    check_dimension,
    flat_index,
    make_params,
    parity_sign,
    parity_vector,
    raising_coefficient,
    spin_raising_matrix,
    spin_z_values,
    state_index,
)


class TestMakeParams:
    def test_standard_operating_point(self):
        p = make_params(1.0, 1.0, 0.5, 10)
        assert p.n_atoms == 20
        assert p.gamma_c == pytest.approx(0.5, abs=1e-15)
        assert p.j == 10.0

    def test_single_atom_limit(self):
        p = make_params(1.0, 1.0, 0.0, 0.5)
        assert p.n_atoms == 1
        assert p.gamma_c == pytest.approx(0.5, abs=1e-15)

    def test_zero_omega0_kills_critical_coupling(self):
        p = make_params(1.0, 0.0, 0.3, 1)
        assert p.gamma_c == 0.0

    @pytest.mark.parametrize(
        "kwargs, field",
        [
            (dict(omega=0.0, omega0=1, gamma=0, j=1), "omega"),
            (dict(omega=-1.0, omega0=1, gamma=0, j=1), "omega"),
            (dict(omega=float("nan"), omega0=1, gamma=0, j=1), "omega"),
            (dict(omega=1, omega0=-0.5, gamma=0, j=1), "omega0"),
            (dict(omega=1, omega0=float("inf"), gamma=0, j=1), "omega0"),
            (dict(omega=1, omega0=1, gamma=-0.1, j=1), "gamma"),
            (dict(omega=1, omega0=1, gamma=0, j=0), "j"),
            (dict(omega=1, omega0=1, gamma=0, j=-1), "j"),
            (dict(omega=1, omega0=1, gamma=0, j=0.3), "j"),
        ],
    )
    def test_domain_errors_name_the_field(self, kwargs, field):
        with pytest.raises(ValueError, match=field):
            make_params(**kwargs)


class TestRaisingCoefficient:
    def test_spin_half_ladder(self):
        assert raising_coefficient(0.5, -0.5) == pytest.approx(1.0, abs=1e-15)

    def test_annihilates_highest_weight(self):
        assert raising_coefficient(1, 1) == 0.0

    def test_j10_m0(self):
        assert raising_coefficient(10, 0) == pytest.approx(math.sqrt(110), abs=1e-14)

    def test_commutator_oracle_j10(self):
        # independent check: [J+, J-] = 2 Jz on the j=10 representation
        two_j = 20
        m = spin_z_values(two_j)
        jp = np.zeros((two_j + 1, two_j + 1))
        for i in range(two_j):
            jp[i + 1, i] = raising_coefficient(10, m[i])
        jm = jp.T
        comm = jp @ jm - jm @ jp
        assert np.max(np.abs(comm - 2 * np.diag(m))) < 1e-12

    @pytest.mark.parametrize("j, m", [(1, 2), (0.5, -1.5), (2, -3)])
    def test_out_of_range_m(self, j, m):
        with pytest.raises(ValueError):
            raising_coefficient(j, m)

    def test_mismatched_half_integers(self):
        with pytest.raises(ValueError):
            raising_coefficient(1, 0.5)


class TestParity:
    @pytest.mark.parametrize("j", [0.5, 1, 2.5, 10])
    def test_examples(self, j):
        assert parity_sign(0, -j, j) == 1
        assert parity_sign(1, -j, j) == -1
        assert parity_sign(2, -j + 1, j) == -1

    def test_vector_matches_scalar(self):
        two_j, x_max = 5, 4
        vec = parity_vector(two_j, x_max)
        for state in basis_states(two_j, x_max):
            assert vec[state.flat] == parity_sign(state.x, state.m, two_j / 2.0)

    def test_invalid_state(self):
        with pytest.raises(ValueError):
            parity_sign(-1, 0, 1)


class TestIndexing:
    @given(
        two_j=st.integers(min_value=1, max_value=24),
        x=st.integers(min_value=0, max_value=40),
        spin_pos=st.integers(min_value=0, max_value=24),
    )
    @settings(max_examples=60, deadline=None)
    def test_flat_round_trip(self, two_j, x, spin_pos):
        spin_pos = spin_pos % (two_j + 1)
        two_m = 2 * spin_pos - two_j
        flat = flat_index(x, two_m, two_j)
        decoded = state_index(flat, two_j)
        assert decoded == StateIndex(x=x, two_m=two_m, flat=flat)

    def test_basis_states_cover_dimension(self):
        states = basis_states(3, 2)
        assert len(states) == 12
        assert [s.flat for s in states] == list(range(12))
        assert states[0].two_m == -3 and states[3].two_m == 3

    def test_m_property(self):
        assert state_index(0, 3).m == -1.5

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            flat_index(-1, 1, 1)
        with pytest.raises(ValueError):
            flat_index(0, 3, 1)
        with pytest.raises(ValueError):
            flat_index(0, 0, 1)  # 2m and 2j parity mismatch


class TestSpinMatrices:
    def test_jx_symmetric_zero_diagonal(self):
        jp = spin_raising_matrix(7)
        jx = 0.5 * (jp + jp.T)
        assert np.array_equal(jx, jx.T)
        assert np.all(np.diag(jx) == 0.0)

    @given(two_j=st.integers(min_value=1, max_value=30))
    @settings(max_examples=30, deadline=None)
    def test_casimir(self, two_j):
        j = two_j / 2.0
        jp = spin_raising_matrix(two_j)
        jx = 0.5 * (jp + jp.T)
        b = 0.5 * (jp - jp.T)  # i*Jy, real; Jy^2 = -b^2
        jz = np.diag(spin_z_values(two_j))
        casimir = jx @ jx - b @ b + jz @ jz
        expected = j * (j + 1) * np.eye(two_j + 1)
        assert np.max(np.abs(casimir - expected)) < 1e-12


class TestBasisSpec:
    def test_dimension(self):
        assert BasisSpec(BasisKind.COHERENT, 20).dimension(80) == 1701

    def test_rejects_negative_truncation(self):
        with pytest.raises(ValueError):
            BasisSpec(BasisKind.FOCK, -1)

    def test_cap(self):
        with pytest.raises(DimensionCapError):
            check_dimension(20, 15, cap=300)
        assert check_dimension(20, 15, cap=336) == 336
