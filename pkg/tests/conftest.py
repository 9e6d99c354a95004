import pytest

from sulfsim import lamperti, pearson
from sulfsim.sulphation import validate_material


@pytest.fixture(scope="session")
def params_sigma1():
    return pearson.validate(7.0, 1.0, 1.0, 1.5)


@pytest.fixture(scope="session")
def params_sigma025():
    return pearson.validate(7.0, 1.0, 0.25, 1.5)


@pytest.fixture(scope="session")
def params_det():
    return pearson.validate(7.0, 1.0, 0.0, 1.5)


@pytest.fixture(scope="session")
def coeffs_sigma1(params_sigma1):
    return lamperti.coefficients(params_sigma1)


@pytest.fixture(scope="session")
def coeffs_sigma025(params_sigma025):
    return lamperti.coefficients(params_sigma025)


@pytest.fixture(scope="session")
def coeffs_det(params_det):
    return lamperti.coefficients(params_det)


@pytest.fixture(scope="session")
def material_default():
    # phi(c) = 0.2 - 0.01 c, c0_bar = 10 => phi(c0_bar) = 0.1, eta_tilde = 15
    return validate_material(0.2, -0.01, 1.0, 0.0, 10.0, 1.5)
