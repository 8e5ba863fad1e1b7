"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid user-supplied configuration or arguments (CLI exit code 2)."""


class EvaluationError(RuntimeError):
    """A numeric evaluation produced unusable values (CLI exit code 3)."""
