"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument violates an operation's precondition."""


class EmptyResultError(ValueError):
    """A detector produced no peaks to convert into a result."""


class NumericError(RuntimeError):
    """A numerical routine (e.g. the eigensolver) failed."""


class ConfigError(ValueError):
    """A run configuration has missing or invalid keys."""

    def __init__(self, message, missing_keys=(), bad_keys=()):
        super().__init__(message)
        self.missing_keys = tuple(missing_keys)
        self.bad_keys = tuple(bad_keys)


class PipelineError(RuntimeError):
    """A processing stage failed; carries the stage name for diagnosis."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}': {cause}")
        self.stage = stage
        self.cause = cause
