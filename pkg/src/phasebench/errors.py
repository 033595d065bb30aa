"""Exception hierarchy shared across the package."""


class PhaseBenchError(Exception):
    """Base class for every error raised by phasebench."""


class InvalidEnsembleError(PhaseBenchError, ValueError):
    """Ensemble parameters that cannot produce a valid k-SAT formula."""


class FormulaDomainError(PhaseBenchError, ValueError):
    """An operation was applied outside its domain (bad lengths, n = 0, ...)."""


class LimitExceededError(PhaseBenchError):
    """An exhaustive or dense computation was refused because n is too large."""

    def __init__(self, what, n, limit):
        self.what = what
        self.n = n
        self.limit = limit
        super().__init__(f"{what}: n={n} exceeds the configured limit of {limit}")


class DimacsError(PhaseBenchError, ValueError):
    """Base class for DIMACS parse failures; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class DimacsHeaderError(DimacsError):
    pass


class DimacsLiteralError(DimacsError):
    pass


class DimacsClauseCountError(DimacsError):
    pass


class DimacsWidthError(DimacsError):
    pass


class ConfigError(PhaseBenchError, ValueError):
    """Invalid sweep configuration."""
