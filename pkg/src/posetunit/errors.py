"""Exception hierarchy shared by all engines."""


class PosetRepError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(PosetRepError, ValueError):
    pass


class CycleError(PosetRepError, ValueError):
    pass


class DuplicateElement(PosetRepError, ValueError):
    pass


class EmptyPoset(PosetRepError, ValueError):
    pass


class NestingViolation(PosetRepError, ValueError):
    def __init__(self, lower, upper):
        super().__init__(f"space of {lower!r} is not contained in space of {upper!r}")
        self.lower = lower
        self.upper = upper


class PosetMismatch(PosetRepError, ValueError):
    pass


class NotAComplement(PosetRepError, ValueError):
    def __init__(self, element):
        super().__init__(f"supplied subspace is not a complement of V_{element}")
        self.element = element


class ProbeConditionFailed(PosetRepError, ValueError):
    pass


class DependentVectors(PosetRepError, ValueError):
    pass


class ZeroAmbient(PosetRepError, ValueError):
    pass


class ZeroSubspace(PosetRepError, ValueError):
    pass


class EmptyList(PosetRepError, ValueError):
    pass


class BudgetExceeded(PosetRepError, RuntimeError):
    pass


class NotStable(PosetRepError, ValueError):
    pass


class ZeroGap(PosetRepError, ValueError):
    pass


class SingularGram(PosetRepError, ArithmeticError):
    pass


class NumericalBreakdown(PosetRepError, ArithmeticError):
    pass


class ParseError(PosetRepError, ValueError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class IndexOutOfRange(ParseError):
    pass


class CatalogCorrupt(PosetRepError, RuntimeError):
    pass


class EngineDisagreement(PosetRepError, RuntimeError):
    pass
