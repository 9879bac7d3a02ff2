"""
Error types raised by the wdrw engines.

Every error carries a stable ``code`` used by the command line (exit 2 messages)
and by the JSON API (``error.code`` field).
"""
from typing import Any, Dict, Optional


class WdrwError(Exception):
    code = 'wdrw_error'

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {'code': self.code, 'message': self.message, 'details': self.details}


class ConfigError(WdrwError):
    code = 'config_error'


class ContextMismatch(WdrwError):
    code = 'context_mismatch'


class LengthUnderflow(WdrwError):
    code = 'length_underflow'


class NonIntegralGhost(WdrwError):
    """A ghost vector that does not come from Witt coordinates."""
    code = 'non_integral_ghost'


class IndexOutsideSupport(WdrwError):
    code = 'index_outside_support'


class CoefficientOutOfRange(WdrwError):
    code = 'coefficient_out_of_range'


class NonIntegralExtraction(WdrwError):
    code = 'non_integral_extraction'


class SingularSystem(WdrwError):
    code = 'singular_system'


class NonIntegralResult(WdrwError):
    code = 'non_integral_result'


class ExponentCapExceeded(WdrwError):
    code = 'exponent_cap_exceeded'


class PreconditionViolated(WdrwError):
    code = 'precondition_violated'


class UnknownInequality(WdrwError):
    code = 'unknown_inequality'


class InvalidLift(WdrwError):
    code = 'invalid_lift'


class NotRelativelyPerfect(WdrwError):
    code = 'not_relatively_perfect'


class MalformedTable(WdrwError):
    code = 'malformed_table'


class PresentationError(WdrwError):
    code = 'presentation_error'


class UnsupportedPresentation(WdrwError):
    code = 'unsupported_presentation'


class WeightBoundExceeded(WdrwError):
    """The element needs generators beyond the configured weight bound."""
    code = 'weight_bound_exceeded'


class DegreeMismatch(WdrwError):
    code = 'degree_mismatch'


class TermSyntaxError(WdrwError):
    code = 'syntax_error'

    def __init__(self, message: str, position: int, text: str = ''):
        super().__init__(f"{message} at position {position}", {'position': position, 'text': text})
        self.position = position


# Errors caused by user input rather than by an engine invariant
USER_ERRORS = (
    ConfigError, TermSyntaxError, DegreeMismatch, PresentationError, InvalidLift,
    CoefficientOutOfRange, PreconditionViolated, UnknownInequality, MalformedTable,
    NotRelativelyPerfect, UnsupportedPresentation, IndexOutsideSupport, ContextMismatch,
    WeightBoundExceeded, NonIntegralExtraction, LengthUnderflow,
)
