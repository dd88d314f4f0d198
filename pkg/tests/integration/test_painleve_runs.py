"""
Long Painleve VI integrations with the residual monitor switched on.
"""

import pytest

from src.core.config import config
from src.services.painleve import PainleveIntegrator, PVIConstants, PVIState

HBAR_SAMPLES = [0.17 + 0.11j, 0.31, 0.23j]


@pytest.mark.slow
@pytest.mark.parametrize("n", [1, 3])
def test_monodromy_residual_stays_small(n):
    settings = config.painleve
    initial = PVIState(settings.u0, settings.v0, settings.tau0)
    trajectory = PainleveIntegrator().integrate(
        initial, PVIConstants(settings.nu), settings.tau_end, n, HBAR_SAMPLES
    )
    assert len(trajectory) >= 100
    assert abs(trajectory[-1].tau - settings.tau_end) < 1e-12
    worst = max(max(point.residuals) for point in trajectory)
    assert worst < settings.residual_threshold


@pytest.mark.slow
def test_fd_mode_tracks_analytic_mode():
    settings = config.painleve
    initial = PVIState(settings.u0, settings.v0, settings.tau0)
    constants = PVIConstants(settings.nu)
    end = settings.tau0 + 0.05j
    analytic = PainleveIntegrator(residual_mode="analytic").integrate(initial, constants, end, 1, HBAR_SAMPLES[:1])
    fd = PainleveIntegrator(residual_mode="fd").integrate(initial, constants, end, 1, HBAR_SAMPLES[:1])
    assert [p.u for p in analytic] == [p.u for p in fd]
    assert max(p.residuals[0] for p in fd) < 1e-6
