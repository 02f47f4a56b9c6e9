"""
Exception hierarchy for the QAHD services.

Every error carries an ``exit_code`` so the CLI can map it without a lookup
table: 2 for malformed or invalid input, 3 for numerical failures.
"""
from typing import Optional


class QahdError(Exception):
    exit_code = 2

    def to_dict(self) -> dict:
        return {"ok": False, "kind": type(self).__name__, "error": str(self)}


class InvalidTerm(QahdError):
    pass


class NonPositiveScale(QahdError):
    pass


class NotDifferentiableInLambda(QahdError):
    pass


class Unsupported(QahdError):
    pass


class OrderZero(QahdError):
    pass


class PreconditionError(QahdError):
    pass


class ParseError(QahdError):
    def __init__(self, message: str, offset: int, expected: Optional[str] = None):
        self.offset = offset
        self.expected = expected
        detail = f"{message} at offset {offset}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)

    def to_dict(self) -> dict:
        out = super().to_dict()
        out["offset"] = self.offset
        out["expected"] = self.expected
        return out


class BranchUnsupported(QahdError):
    pass


class ZeroFrequency(QahdError):
    pass


# numerical failures
class NumericalError(QahdError):
    exit_code = 3


class QuadratureFailure(NumericalError):
    pass


class PoleArgument(NumericalError):
    pass


class IllConditioned(NumericalError):
    pass
