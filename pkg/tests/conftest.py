import numpy as np
import pytest

from horseshoe_thermo.equilibrium import build_mu
from horseshoe_thermo.hyperbolic import derive_constants
from horseshoe_thermo.maps import Parameters
from horseshoe_thermo.transfer import Potential, spectral_solve


@pytest.fixture(scope="session")
def params():
    return Parameters()


@pytest.fixture(scope="session")
def constants(params):
    return derive_constants(params)


@pytest.fixture(scope="session")
def phi_zero():
    return Potential.constant(0.0)


@pytest.fixture(scope="session")
def phi_affine():
    return Potential.affine_in_y(0.0, 0.1)


@pytest.fixture(scope="session")
def phi_center(params):
    return Potential.center_log_derivative(0.05, params.sigma)


@pytest.fixture(scope="session")
def spec12(phi_zero, params):
    return spectral_solve(phi_zero, 12, params)


@pytest.fixture(scope="session")
def mu12(spec12):
    return build_mu(spec12)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
