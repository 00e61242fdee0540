class InputError(ValueError):
    """Malformed caller input (bad feature index, empty dataset where one is required, ...)."""


class ParseError(InputError):
    """A dataset file could not be parsed."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


class ConfigError(ValueError):
    """Unknown strategy name or out-of-range option."""


class InternalError(RuntimeError):
    """A solver invariant was violated; always a bug."""


class SolverTimeout(RuntimeError):
    """The wall-clock budget ran out before the search finished."""

    def __init__(self, message: str = "time limit reached", statistics=None):
        super().__init__(message)
        self.statistics = statistics
