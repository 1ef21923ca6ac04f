"""Exception types shared across the package."""


class HyperdynError(Exception):
    """Base class for all errors raised by hyperdyn."""


class InvalidParameters(HyperdynError, ValueError):
    """Constructor or operation parameters violate a documented precondition."""


class NonInvertibleWeight(HyperdynError):
    """A single weight function lacks an invertibility certificate
    (its |inf| over the line is below the positivity floor)."""


class NonInvertibleWeights(HyperdynError):
    """A weight sequence lacks the invertibility certificate required by
    inverse-shift operations."""


class NotInAlgebra(HyperdynError):
    """The function fails the series-norm membership certificate."""


class NotInDenseSet(HyperdynError):
    """A sequence entry is not supported inside the admissible sublevel
    region required by the witness construction."""


class ZeroInput(HyperdynError):
    """The operation requires a nonzero input function."""


class SetsNotSeparated(HyperdynError):
    """The target set and the forbidden set intersect at the working
    resolution, so no separating bump exists."""


class EmptyRegion(HyperdynError):
    """A sublevel region that must contain an interval has empty interior."""


class NormDepthExceeded(HyperdynError):
    """The series norm failed to meet its tolerance within the depth cap."""


class ConfigError(HyperdynError):
    """An experiment configuration file failed validation.

    Carries enough context to point at the offending line/field.
    """

    def __init__(self, message: str, *, line: int | None = None, field: str | None = None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if field is not None:
            loc.append(f"field {field!r}")
        prefix = f"[{', '.join(loc)}] " if loc else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field
