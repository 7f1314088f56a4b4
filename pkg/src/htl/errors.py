"""Exception types shared by the htl modules."""


class HTLError(Exception):
    """Base class for all htl errors."""


class DomainError(HTLError, ValueError):
    """Argument lies outside the domain of the function (for example on a branch cut)."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class SingularPointError(DomainError):
    """Evaluation requested at an isolated singular point such as z = -1."""


class SampleEvaluationError(DomainError):
    """A circle function failed at an unflagged grid sample."""

    def __init__(self, message: str, index: int, theta: float):
        super().__init__(message, index=index)
        self.theta = theta


class ResolutionError(HTLError, ValueError):
    """Requested resolution exceeds what the discretization supports."""


class DegenerateSymbolError(HTLError, ValueError):
    """Symbol samples come too close to zero for an argument count."""


class PreconditionError(HTLError, ValueError):
    """Input violates a documented precondition."""


class ConfigError(HTLError, ValueError):
    """Invalid run configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
