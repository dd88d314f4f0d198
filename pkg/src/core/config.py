"""
Configuration management for Elliptica.

This module provides centralized configuration management with environment
variable support and validation for the series truncation, the identity
sampler, the R-matrix builders, the Painleve VI monitor and logging.
"""

import os
from typing import List, Optional, Tuple
from pathlib import Path
from dataclasses import dataclass, field
import logging

import coloredlogs
from dotenv import load_dotenv


PROJECT_ROOT = Path(__file__).resolve().parents[2]


@dataclass
class ThetaSeriesConfig:
    """Truncation settings for the theta series and the alternative routes."""

    max_terms: int = 200
    term_tolerance: float = 1e-16
    min_im_tau: float = 0.05
    pole_tolerance: float = 1e-9

    # Oracle routes
    q_series_max_terms: int = 200
    double_series_terms: int = 200


@dataclass
class SamplingConfig:
    """Identity sampler configuration."""

    seed: int = 42
    count: int = 50
    n_list: List[int] = field(default_factory=lambda: [1, 2, 3])
    tau_list: List[complex] = field(default_factory=lambda: [0.8j])
    pole_guard: float = 0.05
    max_attempts_per_sample: int = 200
    workers: int = -1  # -1 = all cores

    # Tolerance ladder
    scalar_tolerance: float = 1e-11
    algebraic_tolerance: float = 1e-10
    fd_tolerance: float = 1e-6
    order_tolerance: float = 0.2
    series_tolerance: float = 5e-2


@dataclass
class RMatrixConfig:
    """R-matrix builder configuration."""

    max_dimension: int = 4096
    fd_step: float = 1e-4
    limit_step: float = 1e-4
    limit_ray_angle: float = 0.3


@dataclass
class PainleveConfig:
    """Painleve VI run parameters. These are configuration, not ground truth."""

    n: int = 1
    tau0: complex = 0.9j
    tau_end: complex = 1.2j
    nu: Tuple[complex, complex, complex, complex] = (0.1, 0.2, 0.3, 0.4)
    u0: complex = 0.31 + 0.14 * 0.9j
    v0: complex = 0.05
    hbar_samples: List[complex] = field(default_factory=lambda: [0.17 + 0.11j, 0.31, 0.23j])
    residual_threshold: float = 1e-7
    fd_step: float = 1e-4
    fd_noise_floor: float = 1e-6
    min_im_tau: float = 0.3
    pole_guard: float = 0.05


@dataclass
class IntegratorConfig:
    """Adaptive Runge-Kutta settings. Steps are fractions of the path parameter."""

    rtol: float = 1e-10
    atol: float = 1e-12
    initial_step: float = 1e-3
    max_step: float = 0.01
    min_step: float = 1e-12
    safety: float = 0.9
    max_growth: float = 5.0
    min_shrink: float = 0.2
    max_steps: int = 100000
    progress: bool = False


@dataclass
class ReportConfig:
    """Report emission settings."""

    schema_path: str = str(PROJECT_ROOT / "report.schema.json")
    output_format: str = "json"
    csv_line_terminator: str = "\r\n"


@dataclass
class LoggingConfig:
    """Logging configuration."""

    level: str = "INFO"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    file_path: Optional[str] = None
    max_file_size: int = 10 * 1024 * 1024  # 10MB
    backup_count: int = 5
    colored: bool = False


def _parse_complex_list(raw: str) -> List[complex]:
    """Parse a comma separated list of Python complex literals such as ``0.8j,0.5+0.9j``."""
    return [complex(item.strip().replace(" ", "")) for item in raw.split(",") if item.strip()]


def _parse_int_list(raw: str) -> List[int]:
    return [int(item) for item in raw.split(",") if item.strip()]


class Config:
    """
    Main configuration class for Elliptica.

    This class manages all configuration settings with environment variable
    support and validation. Values from a ``.env`` file in the working
    directory are loaded first and never override variables already set.
    """

    def __init__(self):
        """Initialize configuration with environment variable overrides."""
        load_dotenv()

        self.theta = self._load_theta_config()
        self.sampling = self._load_sampling_config()
        self.rmatrix = self._load_rmatrix_config()
        self.painleve = self._load_painleve_config()
        self.integrator = self._load_integrator_config()
        self.report = self._load_report_config()
        self.logging = self._load_logging_config()

        # Set up logging
        self._setup_logging()

    def _load_theta_config(self) -> ThetaSeriesConfig:
        """Load theta series configuration from environment variables."""
        return ThetaSeriesConfig(
            max_terms=int(os.getenv("ELLIPTICA_THETA_MAX_TERMS", "200")),
            term_tolerance=float(os.getenv("ELLIPTICA_THETA_TOLERANCE", "1e-16")),
        )

    def _load_sampling_config(self) -> SamplingConfig:
        """Load sampler configuration from environment variables."""
        sampling = SamplingConfig(
            seed=int(os.getenv("ELLIPTICA_SEED", "42")),
            count=int(os.getenv("ELLIPTICA_SAMPLES", "50")),
            pole_guard=float(os.getenv("ELLIPTICA_POLE_GUARD", "0.05")),
            workers=int(os.getenv("ELLIPTICA_WORKERS", "-1")),
        )
        if os.getenv("ELLIPTICA_N_LIST"):
            sampling.n_list = _parse_int_list(os.environ["ELLIPTICA_N_LIST"])
        if os.getenv("ELLIPTICA_TAU_LIST"):
            sampling.tau_list = _parse_complex_list(os.environ["ELLIPTICA_TAU_LIST"])
        return sampling

    def _load_rmatrix_config(self) -> RMatrixConfig:
        """Load R-matrix configuration from environment variables."""
        return RMatrixConfig(
            max_dimension=int(os.getenv("ELLIPTICA_MAX_DIMENSION", "4096")),
        )

    def _load_painleve_config(self) -> PainleveConfig:
        """Load Painleve VI configuration from environment variables."""
        return PainleveConfig(
            n=int(os.getenv("ELLIPTICA_PVI_N", "1")),
        )

    def _load_integrator_config(self) -> IntegratorConfig:
        """Load integrator configuration from environment variables."""
        return IntegratorConfig(
            rtol=float(os.getenv("ELLIPTICA_RTOL", "1e-10")),
            atol=float(os.getenv("ELLIPTICA_ATOL", "1e-12")),
            progress=os.getenv("ELLIPTICA_PROGRESS", "false").lower() == "true",
        )

    def _load_report_config(self) -> ReportConfig:
        """Load report configuration from environment variables."""
        return ReportConfig(
            schema_path=os.getenv("ELLIPTICA_SCHEMA_PATH", str(PROJECT_ROOT / "report.schema.json")),
        )

    def _load_logging_config(self) -> LoggingConfig:
        """Load logging configuration from environment variables."""
        return LoggingConfig(
            level=os.getenv("LOG_LEVEL", "INFO"),
            file_path=os.getenv("LOG_FILE_PATH"),
            max_file_size=int(os.getenv("LOG_MAX_FILE_SIZE", str(10 * 1024 * 1024))),
            backup_count=int(os.getenv("LOG_BACKUP_COUNT", "5")),
            colored=os.getenv("LOG_COLORED", "false").lower() == "true",
        )

    def _setup_logging(self):
        """Set up logging configuration."""
        logging.basicConfig(
            level=getattr(logging, self.logging.level.upper()),
            format=self.logging.format,
            handlers=self._get_log_handlers()
        )
        if self.logging.colored:
            coloredlogs.install(level=self.logging.level.upper(), fmt=self.logging.format)

    def _get_log_handlers(self) -> List[logging.Handler]:
        """Get logging handlers based on configuration."""
        handlers = [logging.StreamHandler()]

        if self.logging.file_path:
            from logging.handlers import RotatingFileHandler
            handlers.append(
                RotatingFileHandler(
                    self.logging.file_path,
                    maxBytes=self.logging.max_file_size,
                    backupCount=self.logging.backup_count
                )
            )

        return handlers

    def set_log_level(self, level: str):
        """Change the root log level after start-up (used by the CLI ``--log-level`` flag)."""
        self.logging.level = level.upper()
        logging.getLogger().setLevel(getattr(logging, self.logging.level))

    def validate(self) -> bool:
        """
        Validate the configuration.

        Returns:
            bool: True if configuration is valid, raises exception otherwise
        """
        # Theta truncation
        if self.theta.max_terms < 8:
            raise ValueError("Theta max_terms must be at least 8")
        if not 0 < self.theta.term_tolerance <= 1e-10:
            raise ValueError("Theta term_tolerance must lie in (0, 1e-10]")

        # Sampler
        if self.sampling.count < 1:
            raise ValueError("Sample count must be positive")
        if not self.sampling.n_list or min(self.sampling.n_list) < 1:
            raise ValueError("N list must contain positive integers")
        if any(tau.imag < self.theta.min_im_tau for tau in self.sampling.tau_list):
            raise ValueError(f"Every tau must satisfy Im tau >= {self.theta.min_im_tau}")
        if not 0 < self.sampling.pole_guard < 0.5:
            raise ValueError("Pole guard must be between 0 and 0.5")

        # Painleve / integrator
        if min(self.painleve.tau0.imag, self.painleve.tau_end.imag) < self.painleve.min_im_tau:
            raise ValueError(f"Painleve path must stay in Im tau >= {self.painleve.min_im_tau}")
        if not 0 < self.integrator.min_step <= self.integrator.max_step <= 1:
            raise ValueError("Integrator steps must satisfy 0 < min_step <= max_step <= 1")

        return True


# Global configuration instance
config = Config()
