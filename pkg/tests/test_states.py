import math

import numpy as np
import pytest

from esdlab import InitialStateParams, build_initial_density, spin_flip, validate
from esdlab.errors import NegativeParameter, NormalizationError
from esdlab.states import SIGMA_YY, is_x_form

from conftest import random_family_params, random_family_state, random_density_matrix


def bell_23():
    """(|eg> + |ge>)/sqrt(2) as a density matrix."""
    psi = np.array([0.0, 1.0, 1.0, 0.0]) / math.sqrt(2.0)
    return np.outer(psi, psi).astype(complex)


class TestBuildInitialDensity:
    def test_direct_substitution(self):
        rho = build_initial_density(InitialStateParams(0.4, 1.0, 1.0, 0.6, math.pi / 2))
        assert rho[0, 0] == pytest.approx(0.4 / 3.0, abs=1e-15)
        assert rho[1, 1] == pytest.approx(1.0 / 3.0, abs=1e-15)
        assert rho[2, 2] == pytest.approx(1.0 / 3.0, abs=1e-15)
        assert rho[3, 3] == pytest.approx(0.2, abs=1e-15)
        assert rho[1, 2] == pytest.approx(1j / 3.0, abs=1e-15)
        assert rho[2, 1] == pytest.approx(-1j / 3.0, abs=1e-15)

    def test_pure_ground_state(self):
        rho = build_initial_density(InitialStateParams(0.0, 0.0, 0.0, 3.0, 0.0))
        expected = np.zeros((4, 4), dtype=complex)
        expected[3, 3] = 1.0
        np.testing.assert_allclose(rho, expected, atol=0.0)

    def test_bell_state(self):
        rho = build_initial_density(InitialStateParams(0.0, 1.5, 1.5, 0.0, 0.0))
        np.testing.assert_allclose(rho, bell_23(), atol=1e-15)

    def test_normalization_error(self):
        with pytest.raises(NormalizationError):
            InitialStateParams(1.0, 1.0, 1.0, 1.0, 0.0)

    def test_negative_parameter(self):
        with pytest.raises(NegativeParameter):
            InitialStateParams(-0.1, 1.0, 1.0, 1.1, 0.0)

    def test_chi_reduced_modulo_2pi(self):
        p = InitialStateParams(0.4, 1.0, 1.0, 0.6, 2.0 * math.pi + 0.25)
        assert p.chi == pytest.approx(0.25, abs=1e-12)

    def test_random_family_states_are_valid(self, rng):
        for _ in range(200):
            diag = validate(build_initial_density(random_family_params(rng)))
            assert diag.trace_error <= 1e-10
            assert diag.hermiticity_error <= 1e-12
            assert diag.min_eigenvalue >= -1e-10


class TestSpinFlip:
    def test_flip_matrix_is_signed_antidiagonal(self):
        expected = np.zeros((4, 4))
        expected[0, 3] = expected[3, 0] = -1.0
        expected[1, 2] = expected[2, 1] = 1.0
        np.testing.assert_allclose(SIGMA_YY, expected, atol=0.0)

    def test_elementwise_sign_map_matches_kronecker(self, rng):
        # out[i, j] = s_i s_j conj(rho[3-i, 3-j]) with s = (-1, 1, 1, -1)
        s = np.array([-1.0, 1.0, 1.0, -1.0])
        for _ in range(50):
            rho = random_density_matrix(rng)
            direct = np.empty((4, 4), dtype=complex)
            for i in range(4):
                for j in range(4):
                    direct[i, j] = s[i] * s[j] * np.conj(rho[3 - i, 3 - j])
            np.testing.assert_allclose(spin_flip(rho), direct, atol=1e-15)

    def test_ground_state_flips_to_excited(self):
        rho = np.zeros((4, 4), dtype=complex)
        rho[3, 3] = 1.0
        flipped = spin_flip(rho)
        expected = np.zeros((4, 4), dtype=complex)
        expected[0, 0] = 1.0
        np.testing.assert_allclose(flipped, expected, atol=0.0)

    def test_maximally_mixed_invariant(self):
        rho = np.eye(4, dtype=complex) / 4.0
        np.testing.assert_allclose(spin_flip(rho), rho, atol=0.0)

    def test_bell_state_fixed_point(self):
        rho = bell_23()
        np.testing.assert_allclose(spin_flip(rho), rho, atol=1e-15)

    def test_involution(self, rng):
        for _ in range(100):
            rho = random_density_matrix(rng)
            np.testing.assert_allclose(spin_flip(spin_flip(rho)), rho, atol=1e-14)

    def test_preserves_trace_and_hermiticity(self, rng):
        for _ in range(100):
            rho = random_density_matrix(rng)
            flipped = spin_flip(rho)
            assert abs(flipped.trace() - rho.trace()) <= 1e-14
            assert np.max(np.abs(flipped - flipped.conj().T)) <= 1e-14

    def test_preserves_x_form(self, rng):
        for _ in range(50):
            rho = random_family_state(rng)
            rho = rho.copy()
            rho[0, 3] = 0.01 + 0.02j  # general X shape includes the corner
            rho[3, 0] = np.conj(rho[0, 3])
            assert is_x_form(spin_flip(rho), allow_rho14=True)


class TestValidate:
    def test_valid_state_diagnostics(self):
        rho = build_initial_density(InitialStateParams(0.4, 1.0, 1.0, 0.6, 1.0))
        diag = validate(rho)
        assert diag.trace_error <= 1e-12
        assert diag.hermiticity_error == 0.0
        assert diag.min_eigenvalue >= -1e-12
        assert diag.ok()

    def test_negative_population_reported(self):
        rho = np.diag([1.1, 0.0, 0.0, -0.1]).astype(complex)
        diag = validate(rho)
        assert diag.trace_error == pytest.approx(0.0, abs=1e-15)
        assert diag.min_eigenvalue == pytest.approx(-0.1, abs=1e-12)
        assert not diag.ok()

    def test_oversized_coherence_reported(self):
        # eigenvalues of the 2x2 coherence block: 0.25 +- 1
        rho = np.diag([0.25, 0.25, 0.25, 0.25]).astype(complex)
        rho[1, 2] = rho[2, 1] = 1.0
        diag = validate(rho)
        assert diag.min_eigenvalue == pytest.approx(-0.75, abs=1e-12)
