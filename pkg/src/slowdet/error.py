"""Error types for slowdet."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any


class ErrorCode(Enum):
    """Error codes shared by the library and the command line."""

    INVALID_INPUT = "invalid_input"
    DOMAIN = "domain"
    PRECISION = "precision"
    MISSING_CERTIFICATE = "missing_certificate"
    MISSING_HEIGHT_CONTROL = "missing_height_control"
    MISSING_BEZOUT = "missing_bezout"
    NOT_APPLICABLE = "not_applicable"
    INVARIANT_VIOLATION = "invariant_violation"
    INTERNAL = "internal"

    def __str__(self) -> str:
        return self.value


_INPUT_CODES = frozenset({
    ErrorCode.INVALID_INPUT,
    ErrorCode.DOMAIN,
    ErrorCode.MISSING_CERTIFICATE,
    ErrorCode.MISSING_HEIGHT_CONTROL,
    ErrorCode.MISSING_BEZOUT,
    ErrorCode.NOT_APPLICABLE,
})

_VIOLATION_CODES = frozenset({ErrorCode.INVARIANT_VIOLATION, ErrorCode.PRECISION})


@dataclass
class SlowdetError(Exception):
    """Error with code, message, and optional data."""

    code: ErrorCode
    message: str
    data: Any | None = None

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"

    @property
    def exit_code(self) -> int:
        """Process exit status for this error (3 input, 2 violation, 1 other)."""
        if self.code in _INPUT_CODES:
            return 3
        if self.code in _VIOLATION_CODES:
            return 2
        return 1

    @staticmethod
    def invalid_input(message: str, data: Any | None = None) -> SlowdetError:
        """Create an INVALID_INPUT error."""
        return SlowdetError(ErrorCode.INVALID_INPUT, message, data)

    @staticmethod
    def domain(message: str, data: Any | None = None) -> SlowdetError:
        """Create a DOMAIN error."""
        return SlowdetError(ErrorCode.DOMAIN, message, data)

    @staticmethod
    def precision(message: str, data: Any | None = None) -> SlowdetError:
        """Create a PRECISION error (the caller should retry with more bits)."""
        return SlowdetError(ErrorCode.PRECISION, message, data)

    @staticmethod
    def missing_certificate(message: str, data: Any | None = None) -> SlowdetError:
        """Create a MISSING_CERTIFICATE error."""
        return SlowdetError(ErrorCode.MISSING_CERTIFICATE, message, data)

    @staticmethod
    def missing_height_control(
        message: str, data: Any | None = None
    ) -> SlowdetError:
        """Create a MISSING_HEIGHT_CONTROL error."""
        return SlowdetError(ErrorCode.MISSING_HEIGHT_CONTROL, message, data)

    @staticmethod
    def missing_bezout(message: str, data: Any | None = None) -> SlowdetError:
        """Create a MISSING_BEZOUT error."""
        return SlowdetError(ErrorCode.MISSING_BEZOUT, message, data)

    @staticmethod
    def not_applicable(message: str, data: Any | None = None) -> SlowdetError:
        """Create a NOT_APPLICABLE error."""
        return SlowdetError(ErrorCode.NOT_APPLICABLE, message, data)

    @staticmethod
    def violation(message: str, data: Any | None = None) -> SlowdetError:
        """Create an INVARIANT_VIOLATION error."""
        return SlowdetError(ErrorCode.INVARIANT_VIOLATION, message, data)

    @staticmethod
    def internal(message: str, data: Any | None = None) -> SlowdetError:
        """Create an INTERNAL error."""
        return SlowdetError(ErrorCode.INTERNAL, message, data)
