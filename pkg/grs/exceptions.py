"""
Error types for grs-toolkit.
Validation problems carry a stable code and the offending element.
"""

from typing import Any, Dict, List, Optional


class GrsError(ValueError):
    """Base class for user-facing errors (CLI exit status 1)."""

    code: str = "invalid-input"

    def __init__(self, message: str, element: Any = None, code: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.element = element
        if code is not None:
            self.code = code

    def to_dict(self) -> Dict[str, Any]:
        return {"code": self.code, "message": self.message, "element": self.element}


class SpaceDocumentError(GrsError):
    code = "malformed-document"

    def __init__(
        self,
        message: str,
        element: Any = None,
        code: Optional[str] = None,
        errors: Optional[List[Dict[str, Any]]] = None,
    ):
        super().__init__(message, element=element, code=code)
        self.errors = errors or []


class UnknownPointError(GrsError):
    code = "unknown-point"


class ZeroStartError(GrsError):
    code = "zero-start"


class EmptyBallError(GrsError):
    code = "empty-ball"


class MissingFieldError(GrsError):
    code = "missing-field"


class NegativeRootError(GrsError):
    code = "negative-root"


class InvalidParameterError(GrsError):
    code = "invalid-parameter"


class NotPrimeError(GrsError):
    code = "not-prime"


class InfiniteGroupError(GrsError):
    code = "infinite-group"


class CapExceededError(GrsError):
    code = "cap-exceeded"


class PresentationError(GrsError):
    code = "mismatched-presentation"


class ClosureError(GrsError):
    code = "closure-exceeded"


class GroupSpecError(GrsError):
    code = "bad-group-spec"


class ConfigError(GrsError):
    code = "bad-config"


class InvariantViolation(AssertionError):
    """An internal invariant failed. Always a bug (CLI exit status 2)."""
