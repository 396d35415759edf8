"""Exception hierarchy for mfshift."""


class MFShiftError(Exception):
    """Base class for all library errors."""


class NonFinite(MFShiftError, ValueError):
    pass


class NodeCollision(MFShiftError, ValueError):
    pass


class DegeneratePairing(MFShiftError, ValueError):
    pass


class AlgebraMismatch(MFShiftError, ValueError):
    pass


class DegreeOutOfRange(MFShiftError, ValueError):
    pass


class ClassifierDisagreement(MFShiftError, RuntimeError):
    """The centralizer and Krylov regularity tests disagree (ill-conditioned input)."""


class SamplingExhausted(MFShiftError, RuntimeError):
    pass


class NotRegular(MFShiftError, ValueError):
    pass


class InsufficientRegularLambdas(MFShiftError, RuntimeError):
    pass


class NotSubregular(MFShiftError, ValueError):
    pass


class NotSemisimple(MFShiftError, ValueError):
    pass


class NotOnSingularLocus(MFShiftError, ValueError):
    pass


class WrongAlgebra(MFShiftError, ValueError):
    pass


class WrongShiftKind(MFShiftError, ValueError):
    pass


class NotSmooth(MFShiftError, ValueError):
    pass


class SmoothnessFailed(MFShiftError, RuntimeError):
    """Transversality of the shift direction failed at a sample.

    ``repro`` carries the data needed to rebuild the discarded sample.
    """

    def __init__(self, message, repro=None):
        super().__init__(message)
        self.repro = repro or {}
