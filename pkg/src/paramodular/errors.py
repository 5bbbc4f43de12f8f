"""Exception hierarchy shared by all modules."""


class ParamodularError(Exception):
    pass


class InvalidPrime(ParamodularError, ValueError):
    pass


class ScaleOverflow(ParamodularError, ArithmeticError):
    """Product of two sqrt(p)-scaled matrices is not divisible by p."""


class NotSymplectic(ParamodularError, ValueError):
    pass


class NonIntegral(ParamodularError, ValueError):
    pass


class NotConjugatable(ParamodularError, ValueError):
    pass


class ChartMismatch(ParamodularError, TypeError):
    pass


class GeneratorInvalid(ParamodularError, ValueError):
    pass


class SingularDenominator(ParamodularError, ArithmeticError):
    pass


class NotInGroup(ParamodularError, ValueError):
    pass


class NotInGammaStar(ParamodularError, ValueError):
    pass


class AuditFailed(ParamodularError, AssertionError):
    def __init__(self, step, message):
        super().__init__(f"step {step}: {message}")
        self.step = step


class WindowOverflow(ParamodularError, OverflowError):
    pass


class FTableTooSmall(ParamodularError, ValueError):
    pass


class CapTooLarge(ParamodularError, ValueError):
    pass


class PrecisionLoss(ParamodularError, ArithmeticError):
    def __init__(self, message, tail=None, value=None):
        super().__init__(message)
        self.tail = tail
        self.value = value


class ConstancyFailure(ParamodularError, AssertionError):
    pass
