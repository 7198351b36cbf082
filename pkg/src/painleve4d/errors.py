"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: parse errors give 2, validation
errors give 3, failed verifications give 4.
"""

from __future__ import annotations


class Painleve4DError(Exception):
    """Base class for all library errors."""


class RegistryMismatch(Painleve4DError):
    pass


class DivisionByZero(Painleve4DError, ZeroDivisionError):
    pass


class DegenerateSubstitution(Painleve4DError):
    def __init__(self, message: str, step: int | None = None):
        super().__init__(message if step is None else f"step {step}: {message}")
        self.step = step


class SingularMatrix(Painleve4DError):
    pass


class ParseError(Painleve4DError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class ValidationError(Painleve4DError):
    pass


class UndeclaredSymbol(ValidationError):
    pass


class ConstantImage(ValidationError):
    pass


class WindowExhausted(Painleve4DError):
    def __init__(self, message: str = "cancellation emptied the truncation window"):
        super().__init__(message + "; retry with a larger window")


class DivisionByZeroSeries(Painleve4DError, ZeroDivisionError):
    pass


class NotUnimodular(Painleve4DError):
    pass


class NotPermuted(Painleve4DError):
    def __init__(self, index: int, image):
        super().__init__(f"image of D{index} is not in the decomposition: {image}")
        self.index = index
        self.image = image


class SingularLocus(Painleve4DError):
    pass


class UnknownKey(ValidationError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)
