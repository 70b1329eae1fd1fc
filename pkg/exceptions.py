"""Error types shared by the library, the CLI and the HTTP layer.

Every error carries the process exit code the CLI reports for it:
4 for bad input or a broken calling contract, 3 when a bounded search or a
randomized test gives up, 2 when a certificate fails verification.
"""

from typing import Any, Dict, Optional


class PermResError(ValueError):
    """Base class for all permres errors."""

    exit_code = 4

    def __init__(self, message: str, *, degree: Optional[int] = None, stage: Optional[int] = None):
        super().__init__(message)
        self.degree = degree
        self.stage = stage

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"error": type(self).__name__, "message": str(self)}
        if self.degree is not None:
            data["degree"] = self.degree
        if self.stage is not None:
            data["stage"] = self.stage
        return data


# =====================================================
# INPUT ERRORS (exit 4)
# =====================================================

class InvalidPermutationError(PermResError):
    pass


class InvalidModuleError(PermResError):
    pass


class UnknownGroupError(PermResError):
    pass


class SpecFormatError(PermResError):
    pass


# =====================================================
# ARITHMETIC CONTRACT ERRORS (exit 4)
# =====================================================

class RingMismatchError(PermResError):
    pass


class ShapeMismatchError(PermResError):
    pass


class UnsupportedRingError(PermResError):
    pass


# =====================================================
# HYPOTHESIS ERRORS (exit 4)
# =====================================================

class HypothesisError(PermResError):
    pass


class NotASubgroupError(HypothesisError):
    pass


class NotNormalError(HypothesisError):
    pass


class SignConsistencyError(HypothesisError):
    pass


# =====================================================
# BOUNDED OUTCOMES (exit 3)
# =====================================================

class CapExceededError(PermResError):
    exit_code = 3


class ExhaustedError(PermResError):
    """A bounded search ran out of budget. This is not a disproof."""

    exit_code = 3

    def __init__(self, message: str, *, caps: Optional[Dict[str, int]] = None, **kwargs):
        super().__init__(message, **kwargs)
        self.caps = dict(caps or {})

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["caps"] = self.caps
        return data


class InconclusiveError(PermResError):
    exit_code = 3


# =====================================================
# VERIFICATION FAILURE (exit 2)
# =====================================================

class CertificateError(PermResError):
    exit_code = 2

    def __init__(self, message: str, *, clause: Optional[str] = None, **kwargs):
        super().__init__(message, **kwargs)
        self.clause = clause

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["clause"] = self.clause
        return data
