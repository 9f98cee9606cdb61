"""Exception hierarchy shared by all modules."""


class VVHeckeError(Exception):
    """Base class for every error raised by this package."""


class IncompatibleOrder(VVHeckeError):
    pass


class UnsupportedExponent(VVHeckeError):
    pass


class DegenerateLattice(VVHeckeError):
    pass


class NotEven(VVHeckeError):
    pass


class NotPositiveDefinite(VVHeckeError):
    pass


class MembershipViolation(VVHeckeError):
    pass


class NonDivisible(VVHeckeError):
    pass


class PrecisionViolation(VVHeckeError):
    """A congruence target is not in the coset demanded by the element."""


class PrecisionInsufficient(VVHeckeError):
    """An operator would need coefficients beyond the stored precision."""


class BudgetExceeded(VVHeckeError):
    pass


class PNotOdd(VVHeckeError):
    pass


class RangeError(VVHeckeError):
    pass


class WitnessNotFound(VVHeckeError):
    pass


class ModuleMismatch(VVHeckeError):
    pass


class WeightMismatch(VVHeckeError):
    pass


class NotADivisor(VVHeckeError):
    pass


class NotCoprime(VVHeckeError):
    pass


class SchemaError(VVHeckeError):
    pass


class DivisionByZero(VVHeckeError, ZeroDivisionError):
    pass
