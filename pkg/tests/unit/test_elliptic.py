"""
Tests for the elliptic special functions.
"""

import cmath
import math

import numpy as np
import pytest

from src.core.exceptions import DomainError, PoleError
from src.services.elliptic import (
    TWO_PI_I,
    check_tau,
    e1,
    e2,
    e2pi,
    kronecker_double_series,
    kronecker_phi,
    kronecker_phi_du,
    kronecker_phi_dz,
    kronecker_phi_dzdu,
    kronecker_q_series,
    kronecker_q_series_partial,
    lattice_distance,
    q_series_delta_partial,
    reduce_to_cell,
    richardson,
    theta,
    theta_derivatives,
    wp,
    wp_prime,
)
from tests.helpers import TAU, close, mp_phi, mp_theta

POINTS = [0.2, 0.31 + 0.07j, -0.4 + 0.3j, 0.45 + 0.6j, 1.7 - 0.9j]


class TestTheta:
    """The odd theta function against mpmath."""

    @pytest.mark.parametrize("z", POINTS)
    def test_matches_mpmath(self, z, tau):
        assert close(theta(z, tau), mp_theta(z, tau), 1e-11)

    def test_odd_and_vanishes_at_zero(self, tau):
        assert abs(theta(0, tau)) < 1e-15
        for z in POINTS:
            assert close(theta(-z, tau), -theta(z, tau), 1e-13)

    def test_quasi_periodicity(self, tau):
        z = 0.31 + 0.07j
        assert close(theta(z + 1, tau), -theta(z, tau), 1e-12)
        assert close(theta(z + tau, tau), -cmath.exp(-1j * math.pi * tau - TWO_PI_I * z) * theta(z, tau), 1e-11)

    def test_derivative_at_zero_is_nonzero(self, tau):
        d1, _ = theta_derivatives(tau)
        assert abs(d1) > 0.1

    def test_rejects_low_modulus(self):
        with pytest.raises(DomainError):
            check_tau(0.01j)
        with pytest.raises(DomainError):
            theta(0.2, -0.5j)


class TestLattice:
    """Cell reduction and lattice distance."""

    def test_reduce_to_cell(self):
        z = 2.3 + 3 * TAU + 0.1j
        z0, m, n = reduce_to_cell(z, TAU)
        assert (m, n) == (2, 3)
        assert abs(z0 + m + n * TAU - z) < 1e-14

    def test_distance(self):
        assert lattice_distance(3 + 2 * TAU, TAU) < 1e-14
        assert abs(lattice_distance(0.5, TAU) - 0.5) < 1e-14
        assert abs(lattice_distance(0.1 + TAU, TAU) - 0.1) < 1e-14


class TestEisenstein:
    """E1, E2, wp and wp'."""

    def test_e1_odd_and_quasi_periodic(self, tau):
        z = 0.31 + 0.07j
        assert close(e1(-z, tau), -e1(z, tau), 1e-12)
        assert close(e1(z + 1, tau), e1(z, tau), 1e-12)
        assert close(e1(z + tau, tau), e1(z, tau) - TWO_PI_I, 1e-12)

    def test_e1_residue(self, tau):
        t = 1e-5
        assert abs(t * e1(t, tau) - 1) < 1e-6

    def test_e2_is_minus_derivative_of_e1(self, tau):
        z, h = 0.31 + 0.07j, 1e-5
        derivative = (e1(z + h, tau) - e1(z - h, tau)) / (2 * h)
        assert close(e2(z, tau), -derivative, 1e-7)

    def test_wp_even_periodic_and_shifted_from_e2(self, tau):
        z, w = 0.31 + 0.07j, -0.2 + 0.4j
        assert close(wp(-z, tau), wp(z, tau), 1e-12)
        assert close(wp(z + tau, tau), wp(z, tau), 1e-11)
        assert close(wp(z, tau) - e2(z, tau), wp(w, tau) - e2(w, tau), 1e-11)

    def test_wp_laurent_expansion(self, tau):
        t = 1e-3 * cmath.exp(0.3j)
        assert abs(wp(t, tau) - 1 / t ** 2) < 1e-4

    def test_wp_prime_is_derivative(self, tau):
        z, h = 0.31 + 0.07j, 1e-5
        derivative = (wp(z + h, tau) - wp(z - h, tau)) / (2 * h)
        assert close(wp_prime(z, tau), derivative, 1e-7)

    def test_pole_raises(self):
        with pytest.raises(PoleError) as excinfo:
            e1(1 + TAU, TAU)
        assert excinfo.value.distance < 1e-9


class TestKronecker:
    """The Kronecker function and its derivatives."""

    def test_example_point(self):
        assert close(kronecker_phi(0.2, 0.3, TAU), mp_phi(0.2, 0.3, TAU), 1e-12)

    @pytest.mark.parametrize("z,u", [(0.2, 0.3), (0.31 + 0.07j, -0.2 + 0.35j), (1.4 + 0.9j, 0.3 - 1.1j)])
    def test_matches_mpmath(self, z, u, tau):
        assert close(kronecker_phi(z, u, tau), mp_phi(z, u, tau), 1e-10)

    def test_symmetric_and_odd(self, tau):
        z, u = 0.31 + 0.07j, -0.2 + 0.35j
        assert close(kronecker_phi(z, u, tau), kronecker_phi(u, z, tau), 1e-12)
        assert close(kronecker_phi(-z, -u, tau), -kronecker_phi(z, u, tau), 1e-12)

    def test_quasi_periodicity(self, tau):
        z, u = 0.31 + 0.07j, -0.2 + 0.35j
        phi = kronecker_phi(z, u, tau)
        assert close(kronecker_phi(z + 1, u, tau), phi, 1e-12)
        assert close(kronecker_phi(z + tau, u, tau), e2pi(-u) * phi, 1e-11)
        assert close(kronecker_phi(z - 2 * tau, u, tau), e2pi(2 * u) * phi, 1e-11)

    def test_zero_where_arguments_cancel(self, tau):
        assert abs(kronecker_phi(0.3 + 0.1j, -0.3 - 0.1j, tau)) < 1e-13

    def test_derivatives_match_eisenstein_form(self, tau):
        z, u = 0.31 + 0.07j, -0.2 + 0.35j
        phi = kronecker_phi(z, u, tau)
        assert close(kronecker_phi_du(z, u, tau), phi * (e1(z + u, tau) - e1(u, tau)), 1e-11)
        assert close(kronecker_phi_dz(z, u, tau), phi * (e1(z + u, tau) - e1(z, tau)), 1e-11)

    def test_mixed_derivative_by_differences(self, tau):
        z, u, h = 0.31 + 0.07j, -0.2 + 0.35j, 1e-5
        derivative = (kronecker_phi_du(z + h, u, tau) - kronecker_phi_du(z - h, u, tau)) / (2 * h)
        assert close(kronecker_phi_dzdu(z, u, tau), derivative, 1e-7)

    def test_heat_equation(self, tau):
        z, u, h = 0.31 + 0.07j, -0.2 + 0.35j, 1e-5
        dtau = (kronecker_phi(z, u, tau + 1j * h) - kronecker_phi(z, u, tau - 1j * h)) / (2j * h)
        assert close(TWO_PI_I * dtau, kronecker_phi_dzdu(z, u, tau), 1e-6)

    def test_local_expansion(self, tau):
        u = -0.2 + 0.35j
        t = 1e-3 * cmath.exp(0.3j)
        expected = 1 / t + e1(u, tau) + t / 2 * (e1(u, tau) ** 2 - wp(u, tau))
        assert abs(kronecker_phi(t, u, tau) - expected) < 1e-4

    def test_fay_identity(self, tau):
        x, y, u, w = 0.31 + 0.07j, -0.17 + 0.22j, 0.4 + 0.1j, 0.12 - 0.3j
        lhs = kronecker_phi(x, u, tau) * kronecker_phi(y, w, tau)
        rhs = (kronecker_phi(x - y, u, tau) * kronecker_phi(y, u + w, tau)
               + kronecker_phi(y - x, w, tau) * kronecker_phi(x, u + w, tau))
        assert close(lhs, rhs, 1e-11)

    def test_degenerate_fay(self, tau):
        x, z = 0.31 + 0.07j, -0.17 + 0.22j
        assert close(kronecker_phi(x, z, tau) * kronecker_phi(x, -z, tau), wp(x, tau) - wp(z, tau), 1e-11)

    def test_pole_in_either_argument(self):
        with pytest.raises(PoleError):
            kronecker_phi(0, 0.3, TAU)
        with pytest.raises(PoleError):
            kronecker_phi(0.2, TAU, TAU)


class TestQSeries:
    """The bilateral q-series route."""

    @pytest.mark.parametrize("z,u", [(0.2 + 0.1j, 0.3 + 0.2j), (0.7 + 0.5j, 0.1 + 0.05j), (0.2, 0.3)])
    def test_agrees_with_theta_route(self, z, u):
        series = TWO_PI_I * kronecker_q_series(e2pi(u), e2pi(z), e2pi(TAU))
        assert close(series, kronecker_phi(z, u, TAU), 1e-12)

    def test_symmetric(self):
        s, t, q = e2pi(0.3 + 0.2j), e2pi(0.2 + 0.1j), e2pi(TAU)
        assert close(kronecker_q_series(s, t, q), kronecker_q_series(t, s, q), 1e-13)

    def test_finite_difference_equation(self):
        s, t, q = e2pi(0.3 + 0.2j), e2pi(0.2 + 0.1j), e2pi(TAU)
        lhs = s * kronecker_q_series_partial(s, t * q, q, 8) - kronecker_q_series_partial(s, t, q, 8)
        assert close(lhs, q_series_delta_partial(t, 8), 1e-12)

    def test_outside_annulus(self):
        q = e2pi(TAU)
        with pytest.raises(DomainError):
            kronecker_q_series(e2pi(-0.1j), e2pi(0.2 + 0.1j), q)
        with pytest.raises(DomainError):
            kronecker_q_series(1.0, e2pi(0.2 + 0.1j), q)


class TestDoubleSeries:
    """Fejer-weighted lattice sums."""

    def test_converges_to_twisted_phi(self):
        z, u = 0.25 + 0.1j, 0.3 + 0.4j
        u2 = u.imag / TAU.imag
        target = e2pi(u2 * z) * kronecker_phi(z, u, TAU)
        assert abs(kronecker_double_series(z, u, TAU) - target) < 5e-2 * abs(target)

    def test_rejects_trivial_character(self):
        with pytest.raises(DomainError):
            kronecker_double_series(0.2, 1 + TAU, TAU)


class TestRichardson:
    """Extrapolation tables."""

    def test_quadratic_error_removed(self):
        values = [2.0 + h ** 2 + h ** 4 for h in (0.1, 0.05, 0.025)]
        assert abs(richardson(values) - 2.0) < 1e-12

    def test_linear_limits_and_arrays(self):
        values = [np.array([1.0 + h, 3.0 - 2 * h]) for h in (0.1, 0.05)]
        np.testing.assert_allclose(richardson(values, power=1), [1.0, 3.0], atol=1e-12)
