import numpy as np
import pytest

from esdlab import InitialStateParams, build_initial_density


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def random_family_params(rng):
    """Random valid (a, b, c, d, chi) with (a+b+c+d)/3 = 1."""
    w = rng.dirichlet(np.ones(4)) * 3.0
    chi = rng.uniform(0.0, 2.0 * np.pi)
    return InitialStateParams(a=w[0], b=w[1], c=w[2], d=w[3], chi=chi)


def random_family_state(rng):
    return build_initial_density(random_family_params(rng))


def random_density_matrix(rng):
    """Random full-rank two-qubit density matrix (Ginibre construction)."""
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = g @ g.conj().T
    return rho / rho.trace()


def random_hermitian(rng):
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    return 0.5 * (g + g.conj().T)
