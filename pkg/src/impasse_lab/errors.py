"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end:
1 for input/parse problems, 2 for mode mismatches, 3 for numerical failures.
"""

from __future__ import annotations


class ImpasseLabError(Exception):
    exit_code = 3


# -- input ------------------------------------------------------------------

class ParseError(ImpasseLabError, ValueError):
    exit_code = 1

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class ExprSyntaxError(ParseError):
    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        self.expected = tuple(expected)
        if expected:
            message = f"{message}; expected one of: {', '.join(expected)}"
        super().__init__(message, position)


class UnknownVariable(ParseError):
    def __init__(self, name: str, position: int):
        self.name = name
        super().__init__(f"unknown variable {name!r}", position)


class NonIntegerExponent(ParseError):
    pass


class ZeroDenominator(ParseError):
    pass


class ModeMismatch(ImpasseLabError):
    exit_code = 2


# -- domain preconditions ---------------------------------------------------

class OnImpasse(ImpasseLabError, ValueError):
    pass


class NotOnImpasse(ImpasseLabError, ValueError):
    pass


class NotAnEquilibrium(ImpasseLabError, ValueError):
    pass


class WrongForm(ImpasseLabError, ValueError):
    pass


class UnsupportedPotential(ImpasseLabError, ValueError):
    pass


class UnknownNormalForm(ImpasseLabError, KeyError):
    exit_code = 1

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class NotOnSlowManifold(ImpasseLabError, ValueError):
    pass


class NotNormallyHyperbolic(ImpasseLabError, ValueError):
    pass


# -- numerics ---------------------------------------------------------------

class NumericError(ImpasseLabError, ArithmeticError):
    pass


class BoxTooSmall(NumericError):
    pass


class SingularJacobian(NumericError):
    pass


class MaxIter(NumericError):
    pass


class NoReturn(NumericError):
    pass


class NewtonDiverged(NumericError):
    def __init__(self, eps: float, message: str = ""):
        self.eps = eps
        super().__init__(f"Newton diverged at eps={eps!r}" + (f": {message}" if message else ""))


class ReturnMapDiverged(NumericError):
    def __init__(self, eps: float, message: str = ""):
        self.eps = eps
        super().__init__(f"return map Newton failed at eps={eps!r}" + (f": {message}" if message else ""))


class SectionMiss(NumericError):
    def __init__(self, eps: float, message: str = ""):
        self.eps = eps
        super().__init__(f"orbit missed the section at eps={eps!r}" + (f": {message}" if message else ""))
