"""Shared exception types."""


class HealthchatError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(HealthchatError, ValueError):
    """Input data violated a documented invariant."""


class SnapshotError(HealthchatError):
    """A persisted snapshot is missing, corrupt, or version-incompatible."""


class UnknownSessionError(HealthchatError, LookupError):
    """No session exists under the given id."""


class SessionBusyError(HealthchatError):
    """Another operation is already in flight for this session."""
