"""Exception types shared across the pipeline.

The CLI maps these onto exit codes: ConfigError -> 1, DataError -> 2,
NumericError -> 3.
"""


class ConfigError(ValueError):
    """Invalid run configuration or command-line usage."""


class DataError(ValueError):
    """Malformed, missing or insufficient input data."""


class NumericError(ArithmeticError):
    """A numerical routine failed (non-convergence, degenerate input)."""


class StageError(RuntimeError):
    """Wraps a failure inside the pipeline with the stage and window that raised it."""

    def __init__(self, stage, window, cause):
        self.stage = stage
        self.window = window
        self.cause = cause
        where = f"stage '{stage}'" + (f", window {window}" if window is not None else "")
        super().__init__(f"{where}: {cause}")
