"""
Core functionality for Elliptica.

This module contains configuration management and the domain exceptions
shared by the numerical services.
"""

from .config import Config, config
from .exceptions import (
    DataValidationError,
    DimensionError,
    DomainError,
    IntegrationHalt,
    PoleError,
    SamplingError,
    TruncationError,
    UnknownCheckError,
)

__all__ = [
    'Config',
    'config',
    'DataValidationError',
    'DimensionError',
    'DomainError',
    'IntegrationHalt',
    'PoleError',
    'SamplingError',
    'TruncationError',
    'UnknownCheckError',
]
