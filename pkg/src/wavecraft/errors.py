"""Exception hierarchy shared by every stage of the pipeline."""


class WavecraftError(Exception):
    """Base class for all package errors."""


class ParseError(WavecraftError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} at offset {position}"
        super().__init__(message)


class UndeclaredSymbol(ParseError):
    pass


class NonPolynomial(WavecraftError):
    pass


class UnboundSymbol(WavecraftError):
    pass


class EvaluationError(WavecraftError, ZeroDivisionError):
    """Division by zero (or a log of a non-positive value) at the binding point."""


class BalanceError(WavecraftError):
    pass


class NoBalance(BalanceError):
    pass


class LinearEquation(BalanceError):
    pass


class NoExactSolution(WavecraftError):
    pass


class TooHard(WavecraftError):
    def __init__(self, message, system=None):
        self.system = system
        super().__init__(message)


class GcdBlowup(TooHard):
    """A gcd computation grew past the degree cap; callers may skip the simplification."""


class ZeroDenominator(WavecraftError):
    pass


class NonNegativeGamma(WavecraftError):
    pass


class NoSignChange(WavecraftError):
    pass


class SingularLocation(WavecraftError):
    pass
