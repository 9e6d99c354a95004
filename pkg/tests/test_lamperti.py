"""Transform round trips and the transformed drift's frozen values."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sulfsim import lamperti
from sulfsim.errors import DomainViolation

ETA = 1.5


def test_forward_endpoints():
    assert lamperti.forward(0.0, ETA) == 0.0
    assert lamperti.forward(ETA, ETA) == pytest.approx(math.pi, rel=1e-15)


def test_forward_known_value():
    # psi = eta/2 -> 2 arcsin(1/sqrt(2)) = pi/2
    assert lamperti.forward(0.75, ETA) == pytest.approx(math.pi / 2, rel=1e-15)
    assert lamperti.inverse(math.pi / 2, ETA) == pytest.approx(0.75, rel=1e-15)


def test_forward_rejects_outside():
    with pytest.raises(DomainViolation):
        lamperti.forward(-0.001, ETA)
    with pytest.raises(DomainViolation):
        lamperti.forward(1.501, ETA)


def test_inverse_accepts_any_real():
    # the anti-transform eta sin^2(y/2) is globally defined and bounded
    y = np.array([-3.0, -0.5, 0.0, 1.0, math.pi, 4.0, 9.0])
    psi = lamperti.inverse(y, ETA)
    assert np.all(psi >= 0.0) and np.all(psi <= ETA)


@given(psi=st.floats(0.0, ETA))
@settings(max_examples=200, deadline=None)
def test_round_trip_psi(psi):
    back = lamperti.inverse(lamperti.forward(psi, ETA), ETA)
    assert abs(back - psi) <= 1e-12 * ETA


@given(y=st.floats(0.0, math.pi))
@settings(max_examples=200, deadline=None)
def test_round_trip_y(y):
    back = lamperti.forward(lamperti.inverse(y, ETA), ETA)
    assert abs(back - y) <= 1e-12 * math.pi


def test_coefficients_sigma1(coeffs_sigma1):
    # a1 = (4 a g - s^2 e)/(4e) = 26.5/6, a2 = 12.5/6, c0 = (2a - s^2)/4
    assert coeffs_sigma1.a1 == pytest.approx(26.5 / 6.0, rel=1e-15)
    assert coeffs_sigma1.a2 == pytest.approx(12.5 / 6.0, rel=1e-15)
    assert coeffs_sigma1.c0_const == pytest.approx(3.25, rel=1e-15)
    assert coeffs_sigma1.y_star == pytest.approx(1.9379651031832765, rel=1e-13)


def test_coefficients_sigma025(coeffs_sigma025):
    assert coeffs_sigma025.a1 == pytest.approx(27.90625 / 6.0, rel=1e-15)
    assert coeffs_sigma025.a2 == pytest.approx(13.90625 / 6.0, rel=1e-15)
    assert coeffs_sigma025.c0_const == pytest.approx(3.484375, rel=1e-15)
    assert coeffs_sigma025.y_star == pytest.approx(1.9122191227268469, rel=1e-13)


def test_coefficients_deterministic(coeffs_det):
    # sigma = 0 still yields well-defined drift data
    assert coeffs_det.a1 == pytest.approx(14.0 / 3.0, rel=1e-15)
    assert coeffs_det.a2 == pytest.approx(7.0 / 3.0, rel=1e-15)
    assert coeffs_det.c0_const == pytest.approx(3.5, rel=1e-15)


def test_drift_frozen_values(coeffs_sigma1, coeffs_sigma025):
    assert lamperti.drift(coeffs_sigma1, 1.0) == pytest.approx(
        6.9465239170554324, rel=1e-13)
    assert lamperti.drift_derivative(coeffs_sigma1, 1.0) == pytest.approx(
        -10.960311713552516, rel=1e-13)
    assert lamperti.drift(coeffs_sigma025, 1.0) == pytest.approx(
        7.2475048307746499, rel=1e-13)
    assert lamperti.drift_derivative(coeffs_sigma025, 1.0) == pytest.approx(
        -11.622319335788794, rel=1e-13)


def test_drift_zero_and_slope_at_y_star(coeffs_sigma1, coeffs_sigma025):
    for d in (coeffs_sigma1, coeffs_sigma025):
        assert abs(lamperti.drift(d, d.y_star)) < 1e-9
        # f'(y*) = -2 C0
        assert lamperti.drift_derivative(d, d.y_star) == pytest.approx(
            -2.0 * d.c0_const, rel=1e-12)


def test_drift_derivative_sup_bound(coeffs_sigma1, coeffs_sigma025):
    frozen = {id(coeffs_sigma1): -6.2833791205335493,
              id(coeffs_sigma025): -6.7676291828974937}
    for d in (coeffs_sigma1, coeffs_sigma025):
        bound = -(d.c0_const + math.sqrt(d.a1 * d.a2))
        assert bound == pytest.approx(frozen[id(d)], rel=1e-13)
        y = np.linspace(1e-4, math.pi - 1e-4, 20001)
        fp = lamperti.drift_derivative(d, y)
        assert np.max(fp) <= bound + 1e-10
        # the bound is attained in the interior
        assert np.max(fp) == pytest.approx(bound, abs=1e-5)


@given(y=st.floats(1e-6, math.pi - 1e-6))
@settings(max_examples=200, deadline=None)
def test_drift_derivative_below_bound(y):
    from sulfsim import pearson
    c = lamperti.coefficients(pearson.validate(7.0, 1.0, 1.0, 1.5))
    assert lamperti.drift_derivative(c, y) <= -(c.c0_const + math.sqrt(c.a1 * c.a2)) + 1e-9


def test_drift_rejects_boundary(coeffs_sigma1):
    for y in (0.0, math.pi, -0.5, 3.5):
        with pytest.raises(DomainViolation):
            lamperti.drift(coeffs_sigma1, y)
        with pytest.raises(DomainViolation):
            lamperti.drift_derivative(coeffs_sigma1, y)


def test_drift_matches_finite_difference(coeffs_sigma1):
    y = np.linspace(0.3, math.pi - 0.3, 41)
    h = 1e-6
    fd = (lamperti.drift(coeffs_sigma1, y + h) - lamperti.drift(coeffs_sigma1, y - h)) / (2 * h)
    assert np.allclose(fd, lamperti.drift_derivative(coeffs_sigma1, y), rtol=1e-7, atol=1e-6)
