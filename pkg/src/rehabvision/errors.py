"""Exception types shared across the package.

The service layer maps these onto HTTP status codes; library code raises
them directly.
"""


class RehabVisionError(Exception):
    """Base class for all package errors."""


class ValidationError(RehabVisionError, ValueError):
    """Input violates a documented precondition or invariant."""


class KeypointLayoutError(ValidationError):
    """A required named keypoint is missing from the source layout."""

    def __init__(self, point_name: str, message: str | None = None):
        self.point_name = point_name
        super().__init__(message or f"layout is missing required keypoint {point_name!r}")


class ConfigurationError(RehabVisionError):
    """A config file, asset, or fingerprint is inconsistent or incomplete."""


class MediaError(RehabVisionError):
    """A video file could not be decoded or encoded."""


class DependencyError(RehabVisionError):
    """A required upstream artifact (e.g. a pose stream) is unavailable."""


class ProviderError(RehabVisionError):
    """An LLM provider call failed after retries were exhausted."""

    def __init__(self, message: str, attempts: int = 1):
        self.attempts = attempts
        super().__init__(message)


class FrameLimitError(ProviderError):
    """Request would exceed the provider's per-call frame cap (pre-flight guard)."""
