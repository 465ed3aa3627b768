"""Exception hierarchy.

Two families matter to callers: :class:`PreconditionViolation` means the
mathematics says no (the decomposition or function does not exist for the
input), while everything else under :class:`ScalarPolarError` is an
operational problem (bad shapes, bad files, numerical breakdown).
"""

from __future__ import annotations


class ScalarPolarError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(ScalarPolarError, ValueError):
    pass


class InvalidMatrix(ScalarPolarError, ValueError):
    """Non-finite entries, wrong rank, or imaginary parts under a real form."""


class ConvergenceFailure(ScalarPolarError, ArithmeticError):
    pass


class IllConditionedSwap(ScalarPolarError, ArithmeticError):
    pass


class SingularSylvester(ScalarPolarError, ArithmeticError):
    pass


class GenerationExhausted(ScalarPolarError, RuntimeError):
    pass


class PreconditionViolation(ScalarPolarError):
    """A mathematical precondition failed.

    Parameters
    ----------
    clause : str
        Short machine-readable name of the violated condition.
    message : str
        Human-readable explanation.
    residual : float, optional
        The measured quantity that decided the failure, when there is one.
    """

    def __init__(self, clause: str, message: str, residual: float | None = None):
        self.clause = clause
        self.residual = residual
        text = f"[{clause}] {message}"
        if residual is not None:
            text += f" (residual={residual:.3e})"
        super().__init__(text)


class SingularInput(PreconditionViolation):
    def __init__(self, message: str, residual: float | None = None):
        super().__init__("nonsingular", message, residual)


class SingularGram(PreconditionViolation):
    def __init__(self, message: str, residual: float | None = None):
        super().__init__("nonsingular-gram", message, residual)


class DoubleAdjointViolation(PreconditionViolation):
    def __init__(self, message: str, residual: float | None = None):
        super().__init__("double-adjoint", message, residual)


class UndefinedAtZero(PreconditionViolation):
    def __init__(self, message: str, residual: float | None = None):
        super().__init__("undefined-at-zero", message, residual)


class NearDiscontinuity(PreconditionViolation):
    def __init__(self, message: str, residual: float | None = None):
        super().__init__("near-discontinuity", message, residual)


class NegativeRealEigenvalue(PreconditionViolation):
    def __init__(self, message: str, residual: float | None = None):
        super().__init__("negative-real-eigenvalue", message, residual)


class StemViolation(PreconditionViolation):
    """A custom stem broke unit modulus or conjugation symmetry on a spectrum."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__("stem-contract", message, residual)


class ParseError(ScalarPolarError, ValueError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class SchemaError(ParseError):
    pass
