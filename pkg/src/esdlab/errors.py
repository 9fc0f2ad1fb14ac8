"""Exception hierarchy for the esdlab package."""


class EsdLabError(Exception):
    """Base class for all esdlab errors."""


class ValidationError(EsdLabError):
    """A scenario or parameter set violates a documented invariant."""


class NormalizationError(ValidationError):
    """Initial-state weights do not satisfy (a + b + c + d) / 3 = 1."""


class NegativeParameter(ValidationError):
    """A parameter that must be non-negative is negative."""


class ModelParameterError(ValidationError):
    """An environment model received an invalid or inconsistent rate."""


class FormError(EsdLabError):
    """A density matrix is not of the required X form (diagonal + 2-3 coherence)."""


class DomainError(EsdLabError):
    """Scalar concurrence evaluator called outside its validity domain."""


class PoleError(DomainError):
    """Correlated-decay closed form requested beyond the gamma12 <= gamma domain."""


class NumericalError(EsdLabError):
    """A numerically computed quantity left its physically allowed range."""


class StepSizeUnderflow(EsdLabError):
    """Adaptive step-size control stalled below the representable step."""


class DiagnosticsExceeded(EsdLabError):
    """Trajectory diagnostics (trace error) exceeded the hard threshold."""


class GridTooCoarse(EsdLabError):
    """Two concurrence sign changes detected within a single grid step."""


class NoESD(EsdLabError):
    """Requested disentanglement onset does not exist for these parameters."""


class ParseError(EsdLabError):
    """Config document could not be parsed; carries a line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownPreset(EsdLabError):
    """Requested figure preset name is not defined."""
