"""Exception and warning types raised by heraldpy."""


class HeraldError(Exception):
    """Base class for all heraldpy errors."""


class InvalidParameterError(HeraldError, ValueError):
    """A physical or numerical parameter is outside its allowed range."""


class ContractViolation(HeraldError, ValueError):
    """Inputs do not satisfy an operation's structural precondition."""


class IngestionError(InvalidParameterError):
    """A user-supplied table could not be parsed."""


class AliasingError(HeraldError):
    """Frequency grid too coarse for the requested time window."""


class NumericalError(HeraldError, RuntimeError):
    """A numerical routine failed to converge or lost accuracy."""


class NoOscillationError(HeraldError):
    """No periodic beat could be detected in a waveform."""


class AccuracyWarning(UserWarning):
    """Quadrature resolution could not meet its accuracy target."""
