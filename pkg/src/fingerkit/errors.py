"""Exception hierarchy shared across the toolkit."""


class FingerkitError(Exception):
    """Base class for domain errors raised by this package."""


class DegenerateGeometryError(FingerkitError):
    """A geometric quantity that must be nonzero vanished (zero link length,
    indeterminate loop equation, singular transmission Jacobian)."""


class NoClosureError(FingerkitError):
    """The mechanism cannot assemble at the requested input angle."""

    def __init__(self, message: str, loop: int | None = None,
                 theta_in: float | None = None):
        super().__init__(message)
        self.loop = loop
        self.theta_in = theta_in


class OutOfRangeError(FingerkitError):
    """An input value lies outside its admissible interval."""


class RuleViolationError(FingerkitError):
    """A reference-registry consistency rule failed.

    Carries the identifiers of the failing rules and the entries involved.
    """

    def __init__(self, message: str, rules: list[str] | None = None):
        super().__init__(message)
        self.rules = rules or []


class ConfigError(FingerkitError):
    """A configuration document is missing, malformed, or violates the schema."""
