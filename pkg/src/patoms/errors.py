"""Error hierarchy.

Every error carries an ``exit_code`` used by the command-line front end.
Families: 2 validation, 3 structure, 4 scale exceeded, 5 unsupported or
out of range, 6 unknown output format.
"""

from __future__ import annotations


class PatomsError(Exception):
    """Base class of all package errors."""

    exit_code = 1


class ValidationError(PatomsError, ValueError):
    """Malformed input value (parse errors, bad words, bad polynomials)."""

    exit_code = 2


class DivisionByZero(ValidationError, ZeroDivisionError):
    exit_code = 2


class InvalidPolynomial(ValidationError):
    exit_code = 2


class InvalidWord(ValidationError):
    exit_code = 2


class InvalidShift(ValidationError):
    exit_code = 2


class StructureError(PatomsError):
    """Input is well formed but violates structural constraints."""

    exit_code = 3


class InadmissibleMove(StructureError):
    exit_code = 3


class LinkageBroken(StructureError):
    exit_code = 3


class WrongConstructor(StructureError):
    exit_code = 3


class NotNonPeriodic(StructureError):
    exit_code = 3


class SizeMismatch(StructureError):
    exit_code = 3


class CompositionMismatch(StructureError):
    exit_code = 3


class DeskScaleExceeded(PatomsError):
    exit_code = 4


class UnsupportedRange(PatomsError):
    exit_code = 5


class OutOfRange(UnsupportedRange):
    exit_code = 5


class Unsupported(UnsupportedRange):
    exit_code = 5


class UnknownFormat(PatomsError):
    exit_code = 6
