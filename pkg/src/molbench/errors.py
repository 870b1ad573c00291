"""Exceptions shared across the pipeline, mapped to CLI exit codes."""


class ConfigError(ValueError):
    """Invalid benchmark configuration (CLI exit code 2)."""


class DataError(ValueError):
    """Unusable input data: files, labels, embeddings, splits (exit code 3)."""


class ConvergenceError(RuntimeError):
    """Posterior sampling failed its diagnostic gates (exit code 4)."""
