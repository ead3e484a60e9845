"""Exception hierarchy.

Two families: ``ValidationFailure`` for inputs that do not describe a valid
problem, and ``NumericalFailure`` for valid inputs the steady-state analysis
cannot handle (unstable models, singular drives). The CLI maps them to exit
codes 2 and 3.
"""


class NHSenseError(Exception):
    """Base class for all package errors."""


class ValidationFailure(NHSenseError, ValueError):
    """Input does not satisfy a structural precondition."""


class NumericalFailure(NHSenseError, ArithmeticError):
    """Input is well formed but numerically outside the supported regime."""


class ShapeMismatch(ValidationFailure):
    pass


class NotHermitian(ValidationFailure):
    pass


class NotPSD(ValidationFailure):
    pass


class NotReciprocal(ValidationFailure):
    pass


class NotDirectional(ValidationFailure):
    pass


class WrongPerturbation(ValidationFailure):
    pass


class WrongDimension(ValidationFailure):
    pass


class NotAtEP(ValidationFailure):
    pass


class InvalidRate(ValidationFailure):
    pass


class DuplicateTones(ValidationFailure):
    pass


class StepTooLarge(ValidationFailure):
    pass


class ConfigMismatch(ValidationFailure):
    pass


class SingularMatrix(NumericalFailure):
    pass


class Unstable(NumericalFailure):
    pass


class UnstableEP(NumericalFailure):
    pass


class ZeroResponse(NumericalFailure):
    pass


class ConstructionFailed(NumericalFailure):
    pass
