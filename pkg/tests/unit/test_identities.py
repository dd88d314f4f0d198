"""
Tests for the identity registry, the sampler and the suite runner.
"""

import math

import numpy as np
import pytest

from src.core.exceptions import DataValidationError, SamplingError, UnknownCheckError
from src.services import registry, run_check, run_suite
from src.services.identities import (
    IdentityRegistry,
    ParameterSampler,
    SamplePlan,
    relative_residual,
)
from src.services.matrixalg import max_abs
from src.services.rmatrix import RParams, quantum_r, unitarity_scalar
from tests.helpers import TAU

REQUIRED_IDS = {
    "scalar_fay", "scalar_fay_deg1", "scalar_fay_deg2", "scalar_fay_deg3", "sym_args",
    "local_h_expansion", "r2_minus_2m", "local_z_expansion", "residue_h", "residue_z",
    "parity_R", "parity_rm", "qp_z_1", "qp_z_tau", "qp_h_1", "qp_h_tau", "qp_gamma_z",
    "qp_gamma_h", "heat", "deriv_h", "deriv_z", "aybe", "fay_mat3_deg_r11",
    "fay_mat3_deg_r120", "fay_mat2", "fay_mat2_deg_r12", "fay_mat2_deg_r13", "unitarity",
    "znzn_symmetry", "kappa_sum", "prop31_components", "cm_qp_1", "cm_qp_tau",
}


class TestRegistry:
    """Registration and lookup."""

    def test_required_ids_registered(self):
        assert REQUIRED_IDS <= set(registry.ids())

    def test_every_check_has_an_anchor(self):
        for check_id in registry.ids():
            check = registry.get(check_id)
            assert check.anchor
            assert check.default_tolerance > 0

    def test_difference_check_is_labelled_as_truncation_consistency(self):
        anchor = registry.get("qseries_difference").anchor
        assert anchor.startswith("truncation consistency")
        assert "partial sums" in anchor

    def test_unknown_id(self):
        with pytest.raises(UnknownCheckError) as excinfo:
            registry.get("nosuch")
        assert excinfo.value.check_id == "nosuch"
        assert "nosuch" in str(excinfo.value)

    def test_duplicate_id_rejected(self):
        target = IdentityRegistry()
        target.check("one", anchor="1 = 1", tolerance=1.0)(lambda s: 0.0)
        with pytest.raises(ValueError):
            target.check("one", anchor="1 = 1", tolerance=1.0)(lambda s: 0.0)


class TestSampler:
    """Seeded pole-guarded sampling."""

    def test_same_seed_same_samples(self, small_plan):
        check = registry.get("scalar_fay")
        first = ParameterSampler(check, small_plan).samples(4)
        second = ParameterSampler(check, small_plan).samples(4)
        assert [s.record() for s in first] == [s.record() for s in second]

    def test_streams_differ_between_checks(self, small_plan):
        first = ParameterSampler(registry.get("unitarity"), small_plan).samples(2)
        second = ParameterSampler(registry.get("sym_args"), small_plan).samples(2)
        assert first[0].values != second[0].values

    def test_samples_stay_in_cell(self, small_plan):
        for sample in ParameterSampler(registry.get("unitarity"), small_plan).samples(4):
            for value in sample.values.values():
                assert 0 <= value.real < 1
                assert 0 <= value.imag < sample.tau.imag

    def test_n_and_tau_cycle(self):
        plan = SamplePlan(seed=1, count=4, n_list=[1, 2], tau_list=[TAU, 0.5 + 0.9j])
        samples = ParameterSampler(registry.get("unitarity"), plan).samples(4)
        assert [s.n for s in samples] == [1, 2, 1, 2]
        assert [s.tau for s in samples] == [TAU, TAU, 0.5 + 0.9j, 0.5 + 0.9j]

    def test_exhausted_guard(self, small_plan):
        target = IdentityRegistry()
        target.check("never", anchor="phi(0, u)", arity=("z",), tolerance=1.0,
                     guards=lambda s: [0.0])(lambda s: 0.0)
        with pytest.raises(SamplingError) as excinfo:
            run_suite(["never"], small_plan, target=target)
        assert excinfo.value.check_id == "never"

    @pytest.mark.parametrize("changes", [dict(seed=-1), dict(count=0), dict(n_list=[]), dict(pole_guard=0.6)])
    def test_plan_validation(self, changes):
        values = dict(seed=1, count=2, n_list=[1], tau_list=[TAU])
        values.update(changes)
        with pytest.raises(DataValidationError):
            SamplePlan(**values)


class TestRunner:
    """Aggregation and determinism."""

    def test_report_fields(self, small_plan):
        report = run_check(registry.get("scalar_fay"), small_plan, workers=1)
        assert report.id == "scalar_fay"
        assert report.samples_run == 4
        assert report.passed
        assert report.max_residual >= report.mean_residual >= 0
        assert set(report.worst_sample) == {"index", "n", "tau", "values", "integers"}

    def test_serial_and_parallel_agree(self, small_plan):
        ids = ["unitarity", "kappa_sum"]
        serial = run_suite(ids, small_plan, workers=1)
        parallel = run_suite(ids, small_plan, workers=2)
        assert [r.model_dump() for r in serial] == [r.model_dump() for r in parallel]

    def test_tolerance_override_can_fail_a_check(self, small_plan):
        [report] = run_suite(["scalar_fay"], small_plan, tolerances={"scalar_fay": 1e-300}, workers=1)
        assert report.tolerance == 1e-300
        assert not report.passed

    def test_perturbed_r_matrix_fails_unitarity(self, small_plan):
        epsilon = 1e-3
        target = IdentityRegistry()
        unitarity = registry.get("unitarity")

        @target.check("unitarity_perturbed", anchor="(R_12 + eps) (R_21 + eps) = N^2 (wp(N hbar) - wp(u))",
                      arity=unitarity.arity, tolerance=unitarity.default_tolerance, guards=unitarity.guards)
        def perturbed(s):
            n, hbar, z = s.n, s["hbar"], s["z"]
            eye = np.eye(n * n)
            r12 = quantum_r(1, 2, RParams(n, s.tau, hbar, z)) + epsilon * eye
            r21 = quantum_r(2, 1, RParams(n, s.tau, hbar, -z)) + epsilon * eye
            expected = unitarity_scalar(n, hbar, z, s.tau) * eye
            return relative_residual(r12 @ r21, expected, max(max_abs(r12), max_abs(r21)))

        report = run_check(target.get("unitarity_perturbed"), small_plan, workers=1)
        assert report.passed is False
        assert 1e-4 < report.max_residual < 1e-2

    def test_unknown_tolerance_override(self, small_plan):
        with pytest.raises(UnknownCheckError):
            run_suite(["scalar_fay"], small_plan, tolerances={"nosuch": 1.0})

    def test_non_finite_residual_fails(self, small_plan):
        target = IdentityRegistry()
        target.check("nan", anchor="nan = 0", tolerance=1.0)(lambda s: math.nan)
        [report] = run_suite(None, small_plan, target=target, workers=1)
        assert report.max_residual is None
        assert not report.passed

    def test_relative_residual(self):
        assert relative_residual(3.0, 3.0) == 0
        assert relative_residual(0.5, 0.25) == 0.25
        assert relative_residual(200.0, 100.0) == 0.5
        assert relative_residual(2.0, 1.0, scale=10.0) == 0.1


@pytest.mark.parametrize("check_id", registry.ids())
def test_every_check_passes_on_a_small_sample(check_id):
    plan = SamplePlan(seed=11, count=2, n_list=[1, 2, 3], tau_list=[TAU])
    [report] = run_suite([check_id], plan, workers=1)
    assert report.passed, f"{check_id}: {report.max_residual} > {report.tolerance}"
