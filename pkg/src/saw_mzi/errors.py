"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input violates a physical or mathematical invariant."""


class ConfigError(ValueError):
    """A configuration file is missing, malformed, or lacks a required key."""


class CalibrationError(DomainError):
    """The calibration procedure could not reach its target."""
