"""
Tests for the Painleve VI right-hand side, Lax pair and integrator.
"""

import numpy as np
import pytest

from src.core.config import IntegratorConfig
from src.core.exceptions import DomainError, IntegrationHalt
from src.services.elliptic import wp_prime
from src.services.painleve import (
    PainleveIntegrator,
    PVIConstants,
    PVIState,
    build_lax,
    check_zero_curvature_identities,
    compare_residual_modes,
    fit_diagonal_defect,
    min_pole_distance,
    monodromy_residual,
    pvi_rhs,
    residual_matrix,
    scalar_pair_identities,
)

NU = PVIConstants((0.1, 0.2, 0.3, 0.4))
STATE = PVIState(0.31 + 0.126j, 0.05, 0.9j)
HBAR = 0.17 + 0.11j


class TestConstants:
    """PVIConstants and the right-hand side."""

    def test_effective_constant(self):
        assert abs(NU.effective_nu_squared() - 0.30) < 1e-15

    def test_needs_four_constants(self):
        with pytest.raises(ValueError):
            PVIConstants((0.1, 0.2, 0.3))

    def test_even_n_collapses_to_single_constant(self):
        expected = -NU.effective_nu_squared() * wp_prime(STATE.u, STATE.tau)
        assert abs(pvi_rhs(STATE, NU, 2) - expected) < 1e-10 * max(1.0, abs(expected))

    def test_zero_constants_give_free_motion(self):
        zero = PVIConstants((0, 0, 0, 0))
        assert pvi_rhs(STATE, zero) == 0
        assert min_pole_distance(STATE, zero) == float("inf")


class TestLaxPair:
    """The 2N^2 x 2N^2 Lax pair and its monodromy residual."""

    @pytest.mark.parametrize("n", [1, 2])
    def test_shapes_and_diagonal(self, n):
        pair = build_lax(STATE, NU, HBAR, n)
        dim = n * n
        assert pair.L.shape == pair.M.shape == (2 * dim, 2 * dim)
        np.testing.assert_allclose(pair.L[:dim, :dim], STATE.v / 2 * np.eye(dim))
        np.testing.assert_allclose(pair.M[:dim, :dim], 0)

    @pytest.mark.parametrize("n", [1, 3])
    def test_on_shell_residual_vanishes(self, n):
        assert monodromy_residual(STATE, NU, HBAR, n) < 1e-8

    def test_finite_difference_mode_agrees(self):
        modes = compare_residual_modes(STATE, NU, HBAR)
        assert modes["fd"] < 1e-6
        assert not modes["ill_conditioned"]

    @pytest.mark.parametrize("n", [1, 3])
    def test_off_shell_defect(self, n):
        delta = 1e-3
        acceleration = pvi_rhs(STATE, NU, n) + delta
        residual = monodromy_residual(STATE, NU, HBAR, n, acceleration=acceleration)
        assert abs(residual / (delta / 2) - 1) < 1e-4

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            residual_matrix(STATE, NU, HBAR, mode="spectral")

    @pytest.mark.parametrize("n,expected", [(2, "single_constant"), (3, "four_constant")])
    def test_defect_follows_parity_of_n(self, n, expected):
        fits = fit_diagonal_defect(STATE, NU, HBAR, n)
        assert fits[expected]["fit_residual"] < 1e-6


class TestZeroCurvatureIdentities:
    """Block identities behind the monodromy-preserving equation."""

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_all_identities_hold(self, n):
        results = check_zero_curvature_identities(STATE.u, HBAR, STATE.tau, n, u_alt=0.2 + 0.3j)
        assert set(results) == {
            "offdiag_cancel", "unitarity", "equation_of_motion",
            "constant_pair", "constant_pair_du", "u_independence",
        }
        for name, residual in results.items():
            assert residual < 1e-9, name

    def test_scalar_pairs(self):
        for a in range(4):
            for b in range(a + 1, 4):
                pair, pair_du = scalar_pair_identities(STATE.u, HBAR, STATE.tau, a, b)
                assert pair < 1e-10
                assert pair_du < 1e-10


class TestIntegrator:
    """Adaptive integration along straight tau paths."""

    def test_free_motion_is_exact(self):
        zero = PVIConstants((0, 0, 0, 0))
        trajectory = PainleveIntegrator().integrate(STATE, zero, 1.2j)
        final = trajectory[-1]
        assert abs(final.tau - 1.2j) < 1e-14
        assert abs(final.u - (STATE.u + STATE.v * 0.3j)) < 1e-12
        assert abs(final.v - STATE.v) < 1e-14

    def test_records_small_residuals(self):
        trajectory = PainleveIntegrator().integrate(STATE, NU, 0.95j, hbar_samples=[HBAR])
        assert len(trajectory) > 2
        assert all(len(point.residuals) == 1 for point in trajectory)
        assert max(point.residuals[0] for point in trajectory) < 1e-7
        assert all(point.min_pole_distance > 0.05 for point in trajectory)

    def test_step_halving_converges_at_fifth_order(self):
        endpoints = []
        for step in (1 / 4, 1 / 8, 1 / 16):
            # every step is accepted at this tolerance, so the step size stays fixed
            settings = IntegratorConfig(rtol=1.0, atol=1e3, initial_step=step, max_step=step)
            final = PainleveIntegrator(settings=settings).integrate(STATE, NU, 1.2j)[-1]
            assert abs(final.tau - 1.2j) < 1e-14
            endpoints.append(np.array([final.u, final.v]))
        coarse = np.max(np.abs(endpoints[0] - endpoints[1]))
        fine = np.max(np.abs(endpoints[1] - endpoints[2]))
        assert fine > 0
        assert 4.0 < np.log2(coarse / fine) < 6.0

    def test_rejects_low_path(self):
        with pytest.raises(DomainError):
            PainleveIntegrator().integrate(STATE, NU, 0.2j)

    def test_halts_at_pole(self):
        with pytest.raises(IntegrationHalt) as excinfo:
            PainleveIntegrator().integrate(PVIState(0, 0.1, 0.9j), NU, 1.0j)
        assert excinfo.value.reason == "pole_approach"
        assert len(excinfo.value.trajectory) == 1

    def test_rejects_unknown_mode(self):
        with pytest.raises(ValueError):
            PainleveIntegrator(residual_mode="spectral")
