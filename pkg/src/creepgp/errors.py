"""Exception hierarchy shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(ValueError):
    """Inconsistent or incomplete run configuration."""


class DataValidationError(ValueError):
    """A dataset violates its structural invariants."""


class CsvParseError(DataValidationError):
    """Malformed CSV input; carries the 1-based line number."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class NumericalError(RuntimeError):
    """A numerical routine failed after exhausting its safeguards."""

    def __init__(self, message: str, attempted_jitters=()):
        if attempted_jitters:
            message = f"{message} (attempted jitters: {list(attempted_jitters)})"
        super().__init__(message)
        self.attempted_jitters = tuple(attempted_jitters)


class McmcError(RuntimeError):
    """Pathological sampler behaviour, e.g. zero acceptance over a full run."""
