"""Exception hierarchy shared across the pipeline.

Each class maps to one CLI exit code (see cli.EXIT_CODES) so that stage
failures are distinguishable in scripts.
"""


class CochangeError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(CochangeError):
    """Invalid configuration value or unusable combination of options."""


class NotARepositoryError(CochangeError):
    """The given path is not a readable git repository."""


class GitError(CochangeError):
    """A git subprocess failed in a way we cannot recover from."""


class MappingError(CochangeError):
    """An offline pull-request mapping file is malformed."""


class ApiError(CochangeError):
    """GitHub API failure (non-auth), carries endpoint and status."""

    def __init__(self, message: str, endpoint: str = "", status: int = 0):
        super().__init__(message)
        self.endpoint = endpoint
        self.status = status


class AuthError(ApiError):
    """GitHub API rejected the token (401/403)."""


class SchemaError(CochangeError):
    """An artifact file has the wrong schema or format version."""


class FeatureSchemaMismatch(CochangeError):
    """A model was applied to vectors missing features it was trained on."""


class InsufficientHistoryError(CochangeError):
    """Repository history is too short for the requested window split."""


class MissingArtifactError(CochangeError):
    """A stage input produced by an earlier stage does not exist."""


class UnknownQueryError(CochangeError):
    """A rank query did not resolve to exactly one method."""

    def __init__(self, message: str, suggestions: list[str] | None = None):
        super().__init__(message)
        self.suggestions = suggestions or []
