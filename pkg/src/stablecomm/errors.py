"""Exception types shared across the package."""


class StablecommError(Exception):
    """Base class for all package errors."""


class ValidationError(StablecommError, ValueError):
    """Bad input data or configuration (maps to CLI exit code 2)."""
