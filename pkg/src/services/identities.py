"""
Registry and runner for numerical identity checks.

Each registered check maps one functional identity to a residual
functional. The runner draws pole-guarded random samples from a
deterministic, per-check random stream, evaluates the residual on every
sample (optionally on a thread pool) and aggregates the results in sample
order, so serial and parallel runs produce identical reports.
"""

import logging
import math
import zlib
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field

from ..core.config import config
from ..core.exceptions import DataValidationError, SamplingError, UnknownCheckError
from .elliptic import check_tau, lattice_distance
from .matrixalg import max_abs

logger = logging.getLogger(__name__)


def complex_record(value: complex) -> Dict[str, float]:
    """Serialize a complex number as {"re": ..., "im": ...}."""
    value = complex(value)
    return {"re": value.real, "im": value.imag}


@dataclass(frozen=True)
class Sample:
    """
    One random parameter point for a check.

    Attributes:
        index (int): Position in the sample stream
        n (int): Matrix size N
        tau (complex): Modulus
        values (dict): Complex parameters by name (z, w, hbar, hbar2, ...)
        integers (dict): Integer parameters by name (slot pairs, half-period indices, ...)
    """

    index: int
    n: int
    tau: complex
    values: Dict[str, complex] = field(default_factory=dict)
    integers: Dict[str, int] = field(default_factory=dict)

    def __getitem__(self, name: str):
        if name in self.values:
            return self.values[name]
        return self.integers[name]

    def record(self) -> dict:
        return {
            "index": self.index,
            "n": self.n,
            "tau": complex_record(self.tau),
            "values": {name: complex_record(v) for name, v in sorted(self.values.items())},
            "integers": dict(sorted(self.integers.items())),
        }


Guard = Callable[[Sample], Iterable[complex]]


@dataclass(frozen=True)
class IdentityCheck:
    """
    A named identity with its residual functional and sampling rules.

    Attributes:
        id (str): Registry id
        anchor (str): The identity being verified, written out
        arity (tuple): Complex parameter names drawn for each sample
        residual_fn (callable): Sample -> nonnegative residual
        default_tolerance (float): Pass threshold
        guards (callable, optional): Sample -> composite arguments that must
            stay at least ``pole_guard`` away from the lattice
        integers (dict): Integer parameter name -> inclusive range
        n_values (tuple, optional): Overrides the plan's N list
        max_samples (int, optional): Caps the sample count for expensive checks
        accept (callable, optional): Extra acceptance predicate on a sample
    """

    id: str
    anchor: str
    arity: Tuple[str, ...]
    residual_fn: Callable[[Sample], float]
    default_tolerance: float
    guards: Optional[Guard] = None
    integers: Dict[str, Tuple[int, int]] = field(default_factory=dict)
    n_values: Optional[Tuple[int, ...]] = None
    max_samples: Optional[int] = None
    accept: Optional[Callable[[Sample], bool]] = None


@dataclass
class SamplePlan:
    """Seeded description of a sample stream."""

    seed: int = 42
    count: int = 50
    n_list: List[int] = field(default_factory=lambda: [1, 2, 3])
    tau_list: List[complex] = field(default_factory=lambda: [0.8j])
    pole_guard: float = 0.05

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise DataValidationError("Seed must be a 64-bit unsigned integer", field_name="seed", value=self.seed)
        if self.count < 1:
            raise DataValidationError("Sample count must be positive", field_name="count", value=self.count)
        if not self.n_list or min(self.n_list) < 1:
            raise DataValidationError("N list must contain positive integers", field_name="n_list", value=self.n_list)
        if not self.tau_list:
            raise DataValidationError("tau list must not be empty", field_name="tau_list", value=self.tau_list)
        self.tau_list = [check_tau(tau) for tau in self.tau_list]
        if not 0 < self.pole_guard < 0.5:
            raise DataValidationError("Pole guard must lie in (0, 0.5)", field_name="pole_guard", value=self.pole_guard)

    @classmethod
    def from_config(cls) -> "SamplePlan":
        sampling = config.sampling
        return cls(
            seed=sampling.seed,
            count=sampling.count,
            n_list=list(sampling.n_list),
            tau_list=list(sampling.tau_list),
            pole_guard=sampling.pole_guard,
        )


class CheckReport(BaseModel):
    """Aggregated result of one check over its sample stream."""

    model_config = ConfigDict(populate_by_name=True)

    id: str
    anchor: str
    samples_run: int
    tolerance: float
    max_residual: Optional[float]
    mean_residual: Optional[float]
    worst_sample: dict
    passed: bool = Field(alias="pass")


class ParameterSampler:
    """
    Deterministic pole-guarded sampler.

    Complex parameters are uniform in the rectangle [0, 1) + [0, Im tau) i.
    N and tau cycle through the plan lists. The stream of a check depends
    only on (seed, check id), never on the order in which checks run.
    """

    def __init__(self, check: IdentityCheck, plan: SamplePlan):
        self.check = check
        self.plan = plan
        self.rng = np.random.default_rng([plan.seed, zlib.crc32(check.id.encode("utf-8"))])
        self.n_values = list(check.n_values or plan.n_list)

    def _draw(self, index: int, n: int, tau: complex) -> Sample:
        values = {}
        for name in self.check.arity:
            re, im = self.rng.random(2)
            values[name] = complex(re, im * tau.imag)
        integers = {
            name: int(self.rng.integers(low, high + 1))
            for name, (low, high) in sorted(self.check.integers.items())
        }
        return Sample(index=index, n=n, tau=tau, values=values, integers=integers)

    def _accepted(self, sample: Sample) -> bool:
        if self.check.guards is not None:
            for argument in self.check.guards(sample):
                if lattice_distance(argument, sample.tau) < self.plan.pole_guard:
                    return False
        if self.check.accept is not None and not self.check.accept(sample):
            return False
        return True

    def samples(self, count: int) -> List[Sample]:
        """Draw ``count`` accepted samples."""
        budget = config.sampling.max_attempts_per_sample
        drawn = []
        for index in range(count):
            n = self.n_values[index % len(self.n_values)]
            tau = self.plan.tau_list[(index // len(self.n_values)) % len(self.plan.tau_list)]
            for attempt in range(budget):
                sample = self._draw(index, n, tau)
                if self._accepted(sample):
                    break
                logger.debug(f"{self.check.id}: rejected draw {attempt} for sample {index}")
            else:
                raise SamplingError(
                    f"Check '{self.check.id}': every draw rejected by the pole guard "
                    f"after {budget} attempts (pole_guard={self.plan.pole_guard})",
                    check_id=self.check.id,
                    attempts=budget,
                )
            drawn.append(sample)
        return drawn


class IdentityRegistry:
    """
    Registry of identity checks keyed by id.

    This class provides methods for:
    - Registering checks through the ``check`` decorator
    - Looking checks up by id
    - Listing ids in registration order
    """

    def __init__(self):
        self._checks: Dict[str, IdentityCheck] = {}

    def register(self, check: IdentityCheck) -> IdentityCheck:
        if check.id in self._checks:
            raise ValueError(f"Duplicate identity check id: {check.id}")
        self._checks[check.id] = check
        return check

    def check(self, check_id: str, *, anchor: str, arity: Sequence[str] = (), tolerance: float,
              guards: Optional[Guard] = None, integers: Optional[Dict[str, Tuple[int, int]]] = None,
              n_values: Optional[Sequence[int]] = None, max_samples: Optional[int] = None,
              accept: Optional[Callable[[Sample], bool]] = None):
        """Decorator registering a residual function under ``check_id``."""
        def decorator(fn: Callable[[Sample], float]) -> Callable[[Sample], float]:
            self.register(IdentityCheck(
                id=check_id,
                anchor=anchor,
                arity=tuple(arity),
                residual_fn=fn,
                default_tolerance=tolerance,
                guards=guards,
                integers=dict(integers or {}),
                n_values=tuple(n_values) if n_values else None,
                max_samples=max_samples,
                accept=accept,
            ))
            return fn
        return decorator

    def get(self, check_id: str) -> IdentityCheck:
        try:
            return self._checks[check_id]
        except KeyError:
            raise UnknownCheckError(f"Unknown identity check id: '{check_id}'", check_id=check_id)

    def ids(self) -> List[str]:
        return list(self._checks)

    def __contains__(self, check_id: str) -> bool:
        return check_id in self._checks

    def __len__(self) -> int:
        return len(self._checks)


def relative_residual(lhs, rhs, scale: Optional[float] = None) -> float:
    """
    max|lhs - rhs| / max(1, scale).

    ``scale`` defaults to the larger of max|lhs| and max|rhs|; callers pass
    the magnitude of the largest uncancelled term when that is larger.
    """
    diff = max_abs(np.asarray(lhs) - np.asarray(rhs))
    if scale is None:
        scale = max(max_abs(lhs), max_abs(rhs))
    return diff / max(1.0, scale)


def _finite(value: float) -> Optional[float]:
    return float(value) if math.isfinite(value) else None


def run_check(check: IdentityCheck, plan: SamplePlan, tolerance: Optional[float] = None,
              workers: Optional[int] = None) -> CheckReport:
    """
    Evaluate one check over its sample stream.

    Args:
        check (IdentityCheck): The check to run
        plan (SamplePlan): Seed, count, N and tau lists, pole guard
        tolerance (float, optional): Overrides the check's default tolerance
        workers (int, optional): joblib thread count; defaults to the configured value

    Returns:
        CheckReport: Aggregate with the worst sample's full parameter record

    Raises:
        SamplingError: If the pole guard rejects every draw for some sample
    """
    tolerance = check.default_tolerance if tolerance is None else tolerance
    workers = config.sampling.workers if workers is None else workers
    count = min(plan.count, check.max_samples) if check.max_samples else plan.count

    logger.info(f"Running check '{check.id}' on {count} samples")
    samples = ParameterSampler(check, plan).samples(count)
    residuals = Parallel(n_jobs=workers, prefer="threads")(
        delayed(check.residual_fn)(sample) for sample in samples
    )
    residuals = np.array([float(r) if np.isfinite(r) else math.inf for r in residuals])

    worst = int(np.argmax(residuals))
    max_residual = float(residuals[worst])
    report = CheckReport(
        id=check.id,
        anchor=check.anchor,
        samples_run=len(samples),
        tolerance=tolerance,
        max_residual=_finite(max_residual),
        mean_residual=_finite(float(residuals.mean())),
        worst_sample=samples[worst].record(),
        passed=bool(max_residual <= tolerance),
    )
    status = "passed" if report.passed else "FAILED"
    logger.info(f"Check '{check.id}' {status}: max residual {max_residual:.3e} (tolerance {tolerance:.1e})")
    return report


def run_suite(ids: Optional[Sequence[str]], plan: SamplePlan, tolerances: Optional[Dict[str, float]] = None,
              workers: Optional[int] = None, target: Optional[IdentityRegistry] = None) -> List[CheckReport]:
    """
    Run several checks in the given order (default: every registered check).

    Raises:
        UnknownCheckError: If an id or a tolerance override names an unknown check
    """
    target = target or registry
    tolerances = tolerances or {}
    selected = list(ids) if ids else target.ids()
    for check_id in list(selected) + list(tolerances):
        target.get(check_id)
    return [run_check(target.get(check_id), plan, tolerances.get(check_id), workers) for check_id in selected]


# Global identity registry instance
registry = IdentityRegistry()
