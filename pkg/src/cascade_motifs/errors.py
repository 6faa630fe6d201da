"""Exception types shared across the package."""


class CascadeMotifsError(Exception):
    """Base class for all package errors."""


class ConfigError(CascadeMotifsError, ValueError):
    pass


class ParseError(CascadeMotifsError, ValueError):
    """Malformed input record. ``line`` is 1-based and counts the header."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class DataError(CascadeMotifsError, ValueError):
    """Well-formed record that violates a data invariant."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class ClassificationError(CascadeMotifsError):
    pass


class WindowingError(CascadeMotifsError):
    pass


class LifecycleError(CascadeMotifsError):
    pass


class ContractViolation(CascadeMotifsError, ValueError):
    pass


class EvaluationError(CascadeMotifsError):
    pass


class RandomizationWarning(UserWarning):
    """Edge switching stopped before reaching the requested number of switches."""


class DataWarning(UserWarning):
    pass
