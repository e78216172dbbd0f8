"""Exception hierarchy.

Every numerical failure the library can signal derives from ``NLSError`` and
belongs to one of three families, which the command-line front end maps onto
exit codes: input/contract errors (``InputError``), violated numerical
contracts (``NumericalContractError``) and failed iterations
(``ConvergenceError``).
"""


class NLSError(Exception):
    """Base class for all library errors."""


class InputError(NLSError, ValueError):
    pass


class NumericalContractError(NLSError, ArithmeticError):
    pass


class ConvergenceError(NLSError, ArithmeticError):
    pass


# -- input / configuration -------------------------------------------------
class DegenerateQuantumNumbers(InputError):
    pass


class DeltaTooLarge(InputError):
    pass


class RegimeMismatch(InputError):
    pass


class GeometryMismatch(InputError):
    pass


class CoincidingRapidities(InputError):
    pass


class OrderTooLarge(InputError):
    pass


class CostGuardExceeded(InputError):
    pass


class StripViolation(InputError):
    pass


class OutOfRange(InputError):
    pass


class OnSegment(InputError):
    pass


class BarnesRange(InputError):
    pass


# -- numerical contracts ---------------------------------------------------
class SeparationTooSmall(NumericalContractError):
    pass


class RootCollision(NumericalContractError):
    pass


class NonPositiveResult(NumericalContractError):
    pass


class SingularNystrom(NumericalContractError):
    pass


class DenominatorZero(NumericalContractError):
    pass


class ContourInvalid(NumericalContractError):
    pass


class DeformationImpossible(NumericalContractError):
    pass


class RangeViolation(NumericalContractError):
    pass


# -- iterations ------------------------------------------------------------
class NonConvergence(ConvergenceError):
    pass


class BracketingFailure(ConvergenceError):
    pass


class NonConvergedNodes(ConvergenceError):
    pass
