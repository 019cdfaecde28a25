"""Exception types shared across the package."""


class FormatError(ValueError):
    """Malformed or unsupported image file."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)
        self.offset = offset


class DivergenceError(ArithmeticError):
    """The clustering objective became non-finite."""

    def __init__(self, iteration, value):
        super().__init__(f"objective diverged at iteration {iteration}: {value!r}")
        self.iteration = iteration
        self.value = value


class StageError(RuntimeError):
    """A pipeline stage failed; wraps the original exception."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
