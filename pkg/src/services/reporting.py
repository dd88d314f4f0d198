"""
Report models and machine-readable output.

This module provides:
- The run configuration echoed into every report
- The suite report model and its deterministic JSON encoding
- Validation of emitted reports against the shipped JSON schema
- CSV tables for suite results, Painleve VI trajectories and special-function grids
"""

import csv
import io
import logging
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence

import jsonschema
import numpy as np
import orjson
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .. import __version__
from ..core.config import config
from ..core.exceptions import DataValidationError, PoleError
from .elliptic import e1, e2, kronecker_phi, lattice_distance, wp
from .identities import CheckReport, SamplePlan, complex_record
from .painleve import TrajectoryPoint

logger = logging.getLogger(__name__)

REPORT_VERSION = "1.0"

SUITE_COLUMNS = ["id", "samples_run", "tolerance", "max_residual", "mean_residual", "pass"]
TABLE_COLUMNS = [
    "z_re", "z_im", "u_re", "u_im", "phi_re", "phi_im", "E1_re", "E1_im",
    "E2_re", "E2_im", "wp_re", "wp_im", "pole_flag",
]


class RunConfig(BaseModel):
    """Validated command-line configuration of one run."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    command: Literal["check", "pvi", "table", "list"]
    seed: int = 42
    n_list: List[int] = Field(default_factory=lambda: [1, 2, 3])
    tau_list: List[complex] = Field(default_factory=lambda: [0.8j])
    sample_count: int = 50
    tolerances: Dict[str, float] = Field(default_factory=dict)
    output_path: Optional[str] = None
    output_format: Literal["json", "csv"] = "json"
    workers: int = -1
    pole_guard: float = 0.05

    @field_validator("seed")
    @classmethod
    def _seed_range(cls, value: int) -> int:
        if not 0 <= value < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        return value

    @field_validator("n_list")
    @classmethod
    def _positive_n(cls, value: List[int]) -> List[int]:
        if not value or min(value) < 1:
            raise ValueError("N list must contain positive integers")
        return value

    @field_validator("sample_count")
    @classmethod
    def _positive_count(cls, value: int) -> int:
        if value < 1:
            raise ValueError("sample count must be positive")
        return value

    @field_validator("tolerances")
    @classmethod
    def _positive_tolerances(cls, value: Dict[str, float]) -> Dict[str, float]:
        for check_id, tolerance in value.items():
            if not tolerance > 0:
                raise ValueError(f"tolerance for '{check_id}' must be positive")
        return value

    @classmethod
    def from_config(cls, command: str, **overrides) -> "RunConfig":
        """Defaults from the global configuration, then explicit overrides."""
        sampling = config.sampling
        values = dict(
            command=command,
            seed=sampling.seed,
            n_list=list(sampling.n_list),
            tau_list=list(sampling.tau_list),
            sample_count=sampling.count,
            workers=sampling.workers,
            pole_guard=sampling.pole_guard,
            output_format=config.report.output_format,
        )
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def to_plan(self) -> SamplePlan:
        return SamplePlan(
            seed=self.seed,
            count=self.sample_count,
            n_list=list(self.n_list),
            tau_list=list(self.tau_list),
            pole_guard=self.pole_guard,
        )

    def echo(self) -> dict:
        """JSON-safe record of the run configuration. Output location is not echoed."""
        return {
            "command": self.command,
            "seed": self.seed,
            "n_list": list(self.n_list),
            "tau_list": [complex_record(tau) for tau in self.tau_list],
            "sample_count": self.sample_count,
            "tolerances": dict(sorted(self.tolerances.items())),
            "pole_guard": self.pole_guard,
        }


class SuiteReport(BaseModel):
    """Outcome of one suite run; ``pass`` holds iff every check passed."""

    model_config = ConfigDict(populate_by_name=True)

    version: str
    report_version: str = REPORT_VERSION
    config: dict
    checks: List[CheckReport]
    passed: bool = Field(alias="pass")
    wall_time_s: float

    def payload(self) -> dict:
        return self.model_dump(by_alias=True)


def build_suite_report(run_config: RunConfig, checks: Sequence[CheckReport], wall_time: float) -> SuiteReport:
    """Aggregate check reports into a suite report."""
    return SuiteReport(
        version=__version__,
        config=run_config.echo(),
        checks=list(checks),
        passed=all(check.passed for check in checks),
        wall_time_s=round(float(wall_time), 6),
    )


@lru_cache(maxsize=4)
def load_schema(schema_path: Optional[str] = None) -> dict:
    path = Path(schema_path or config.report.schema_path)
    return orjson.loads(path.read_bytes())


def validate_report(payload: dict, schema_path: Optional[str] = None):
    """
    Validate a report payload against the JSON schema.

    Raises:
        DataValidationError: If the payload violates the schema
    """
    try:
        jsonschema.validate(instance=payload, schema=load_schema(schema_path))
    except jsonschema.ValidationError as e:
        location = "/".join(str(part) for part in e.absolute_path)
        logger.error(f"Report failed schema validation at '{location}': {e.message}")
        raise DataValidationError(f"Report violates schema: {e.message}", field_name=location, value=e.instance)


def report_bytes(report: SuiteReport) -> bytes:
    """Deterministic JSON encoding: sorted keys, two-space indent, trailing newline."""
    payload = report.payload()
    validate_report(payload)
    return orjson.dumps(payload, option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2) + b"\n"


def write_report(report: SuiteReport, path: str) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(report_bytes(report))
    logger.info(f"Report written to {target}")
    return target


# CSV tables

def to_csv(frame: pd.DataFrame, path: Optional[str] = None) -> str:
    """RFC-4180 CSV with a header row. Writes to ``path`` when given and returns the text."""
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, lineterminator=config.report.csv_line_terminator,
                 quoting=csv.QUOTE_MINIMAL, float_format="%.17g")
    text = buffer.getvalue()
    if path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(text.encode("utf-8"))
        logger.info(f"CSV written to {target} ({len(frame)} rows)")
    return text


def suite_frame(report: SuiteReport) -> pd.DataFrame:
    """Flat per-check table of a suite report."""
    rows = [
        {
            "id": check.id,
            "samples_run": check.samples_run,
            "tolerance": check.tolerance,
            "max_residual": check.max_residual,
            "mean_residual": check.mean_residual,
            "pass": int(check.passed),
        }
        for check in report.checks
    ]
    return pd.DataFrame(rows, columns=SUITE_COLUMNS)


def trajectory_frame(points: Sequence[TrajectoryPoint], hbar_samples: Sequence[complex]) -> pd.DataFrame:
    """One row per accepted integrator point, one residual column per hbar sample."""
    residual_columns = [f"residual_h{k}" for k in range(len(hbar_samples))]
    rows = []
    for point in points:
        row = {
            "tau_re": point.tau.real, "tau_im": point.tau.imag,
            "u_re": point.u.real, "u_im": point.u.imag,
            "v_re": point.v.real, "v_im": point.v.imag,
        }
        row.update(zip(residual_columns, point.residuals))
        row["min_pole_distance"] = point.min_pole_distance
        row["local_error"] = point.local_error
        rows.append(row)
    columns = ["tau_re", "tau_im", "u_re", "u_im", "v_re", "v_im", *residual_columns,
               "min_pole_distance", "local_error"]
    return pd.DataFrame(rows, columns=columns)


def cell_grid(size: int, tau: complex) -> List[complex]:
    """size x size points j/size + k tau/size of the fundamental cell, z = 0 first."""
    return [j / size + k * tau / size for j in range(size) for k in range(size)]


def function_table(z_values: Sequence[complex], u: complex, tau: complex,
                   pole_guard: Optional[float] = None) -> pd.DataFrame:
    """
    phi(z, u), E1(z), E2(z) and wp(z) on a list of points.

    Rows whose z or u lies within ``pole_guard`` of the lattice carry
    pole_flag = 1 and empty value cells.
    """
    guard = config.sampling.pole_guard if pole_guard is None else pole_guard
    rows = []
    for z in z_values:
        z = complex(z)
        row = {"z_re": z.real, "z_im": z.imag, "u_re": u.real, "u_im": u.imag}
        flagged = lattice_distance(z, tau) < guard or lattice_distance(u, tau) < guard
        values = {}
        if not flagged:
            try:
                values = {"phi": kronecker_phi(z, u, tau), "E1": e1(z, tau), "E2": e2(z, tau), "wp": wp(z, tau)}
            except PoleError as e:
                logger.warning(f"Pole at z={z}: {e.message}")
                flagged = True
        for name in ("phi", "E1", "E2", "wp"):
            value = values.get(name, complex(np.nan, np.nan))
            row[f"{name}_re"] = value.real
            row[f"{name}_im"] = value.imag
        row["pole_flag"] = int(flagged)
        rows.append(row)
    return pd.DataFrame(rows, columns=TABLE_COLUMNS)


def gnuplot_hint(kind: str, path: str) -> str:
    """A ready-to-paste gnuplot recipe for a CSV written by the CLI."""
    head = f"set datafile separator ','; set key autotitle columnhead; file = '{path}'"
    if kind == "pvi":
        return (f"{head}\n"
                "set multiplot layout 2,1\n"
                "plot file using 2:3 with lines title 'Re u', file using 2:4 with lines title 'Im u'\n"
                "set logscale y; plot file using 2:7 with lines title 'residual'\n"
                "unset multiplot")
    if kind == "table":
        return (f"{head}\n"
                "set view map; splot file using 1:2:(sqrt($5**2 + $6**2)) with points palette title '|phi|'")
    raise ValueError(f"No plotting recipe for '{kind}'")
