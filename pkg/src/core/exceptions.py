"""
Custom exceptions for Elliptica.

This module defines application-specific exceptions that carry the
numerical context of a failure (the offending argument, the last series
term, the partial trajectory) so callers can report or recover.
"""


class TruncationError(Exception):
    """
    Raised when a truncated series does not converge.

    This exception is used when the theta series or the q-series exhausts
    its term budget before the tail drops below the configured tolerance.
    """

    def __init__(self, message: str, last_term: float = None, terms_used: int = None):
        """
        Initialize the TruncationError.

        Args:
            message (str): Human-readable error message
            last_term (float, optional): Magnitude of the last summed term
            terms_used (int, optional): Number of terms summed before giving up
        """
        self.message = message
        self.last_term = last_term
        self.terms_used = terms_used
        super().__init__(self.message)


class PoleError(Exception):
    """
    Raised when a function is evaluated too close to one of its poles.

    The evaluator only rejects arguments within the pole tolerance of the
    lattice; the wider pole guard is enforced by the samplers.
    """

    def __init__(self, message: str, argument: complex = None, distance: float = None):
        """
        Initialize the PoleError.

        Args:
            message (str): Human-readable error message
            argument (complex, optional): The offending argument
            distance (float, optional): Its distance to the lattice Z + tau Z
        """
        self.message = message
        self.argument = argument
        self.distance = distance
        super().__init__(self.message)


class DomainError(Exception):
    """
    Raised when a parameter lies outside the domain of an evaluation route.
    """

    def __init__(self, message: str, parameter: str = None, value=None):
        """
        Initialize the DomainError.

        Args:
            message (str): Human-readable error message
            parameter (str, optional): Name of the parameter out of range
            value (optional): The rejected value
        """
        self.message = message
        self.parameter = parameter
        self.value = value
        super().__init__(self.message)


class DimensionError(Exception):
    """
    Raised when matrix sizes or tensor slots are inconsistent.

    This exception covers kron/embedding size mismatches, slot collisions
    and matrices above the configured dimension cap.
    """

    def __init__(self, message: str, expected=None, actual=None):
        """
        Initialize the DimensionError.

        Args:
            message (str): Human-readable error message
            expected (optional): Expected size or slot range
            actual (optional): Size or slot that was supplied
        """
        self.message = message
        self.expected = expected
        self.actual = actual
        super().__init__(self.message)


class UnknownCheckError(Exception):
    """
    Raised when an identity check id is not registered.
    """

    def __init__(self, message: str, check_id: str = None):
        """
        Initialize the UnknownCheckError.

        Args:
            message (str): Human-readable error message
            check_id (str, optional): The id that failed to resolve
        """
        self.message = message
        self.check_id = check_id
        super().__init__(self.message)


class SamplingError(Exception):
    """
    Raised when the sampler cannot draw a pole-guarded sample.

    This happens when the sample plan is too tight, i.e. every draw in the
    attempt budget was rejected by the pole guard.
    """

    def __init__(self, message: str, check_id: str = None, attempts: int = None):
        """
        Initialize the SamplingError.

        Args:
            message (str): Human-readable error message
            check_id (str, optional): Check whose guards rejected every draw
            attempts (int, optional): Number of draws attempted
        """
        self.message = message
        self.check_id = check_id
        self.attempts = attempts
        super().__init__(self.message)


class IntegrationHalt(Exception):
    """
    Raised when the Painleve VI integrator stops before the end of its path.

    The partial trajectory is attached so callers can still emit it.
    """

    def __init__(self, message: str, reason: str = None, trajectory: list = None):
        """
        Initialize the IntegrationHalt.

        Args:
            message (str): Human-readable error message
            reason (str, optional): One of "pole_approach", "step_underflow", "max_steps"
            trajectory (list, optional): Trajectory points accepted before the halt
        """
        self.message = message
        self.reason = reason
        self.trajectory = trajectory or []
        super().__init__(self.message)


class DataValidationError(Exception):
    """
    Raised when data validation fails.

    This exception is used when a sample plan, run configuration or
    emitted report doesn't meet the expected format or constraints.
    """

    def __init__(self, message: str, field_name: str = None, value=None):
        """
        Initialize the DataValidationError.

        Args:
            message (str): Human-readable error message
            field_name (str, optional): Name of the field that failed validation
            value (optional): The invalid value
        """
        self.message = message
        self.field_name = field_name
        self.value = value
        super().__init__(self.message)
