"""
Shared fixtures for the Elliptica test suite.
"""

import pytest

from src.services.identities import SamplePlan
from tests.helpers import TAU, TAU_SKEW


@pytest.fixture(params=[TAU, TAU_SKEW], ids=["tau=0.8i", "tau=0.5+0.9i"])
def tau(request):
    return request.param


@pytest.fixture
def small_plan():
    """A cheap deterministic sample plan."""
    return SamplePlan(seed=7, count=4, n_list=[1, 2], tau_list=[TAU])
