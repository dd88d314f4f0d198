"""
Numerical services for Elliptica.

Importing the package registers every identity check with the global
registry.
"""

from . import identity_checks  # noqa: F401
from .identities import registry, run_check, run_suite

__all__ = ['registry', 'run_check', 'run_suite']
