# Error types for the SOD calculus

from typing import Any, Dict, Optional


class SodCalcError(Exception):
    """Base class for every domain failure; `code` is stable across releases."""

    code = "SodCalcError"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None, code: Optional[str] = None):
        super().__init__(message)
        if code is not None:
            self.code = code
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        payload = {"error": str(self), "code": self.code}
        if self.details:
            payload["details"] = self.details
        return payload


# core-calculus

class InvalidParams(SodCalcError):
    code = "InvalidParams"


class ParamMismatch(SodCalcError):
    code = "ParamMismatch"


class DuplicateBlock(SodCalcError):
    code = "DuplicateBlock"


class CertificationFailed(SodCalcError):
    code = "CertificationFailed"


# adjunction-engine / window-oracle

class SpaceMismatch(SodCalcError):
    code = "SpaceMismatch"


class BZUndefined(SodCalcError):
    code = "BZUndefined"


class PhiBlockUnsupported(SodCalcError):
    code = "PhiBlockUnsupported"


class NotGuaranteedNoExplanation(SodCalcError):
    code = "NotGuaranteedNoExplanation"


# mutation-engine

class NotComposite(SodCalcError):
    code = "NotComposite"


class RuleNotApplicable(SodCalcError):
    code = "RuleNotApplicable"


class PrefixNotCk(SodCalcError):
    code = "PrefixNotCk"


class SimplificationBlocked(SodCalcError):
    code = "SimplificationBlocked"


# theorem-driver

class InductionStepFailed(SodCalcError):
    code = "InductionStepFailed"


class RelabelMismatch(SodCalcError):
    code = "RelabelMismatch"


class InvalidPreset(SodCalcError):
    code = "InvalidPreset"


class ReplayFailed(SodCalcError):
    """Raised when a replay aborts; `step` is the TraceStep that failed, if any."""

    code = "ReplayFailed"

    def __init__(self, message: str, step: Any = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)
        self.step = step


# dsl

class DslSyntaxError(SodCalcError):
    code = "DslSyntaxError"

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})", {"line": line, "column": column})
        self.line = line
        self.column = column


class DslSemanticError(SodCalcError):
    code = "DslSemanticError"


class ScriptAssertionFailed(SodCalcError):
    code = "ScriptAssertionFailed"


# traces

class TraceFormatError(SodCalcError):
    code = "TraceFormatError"


class UnknownSchemaVersion(TraceFormatError):
    code = "UnknownSchemaVersion"


class TraceCheckFailed(SodCalcError):
    code = "TraceCheckFailed"

    def __init__(self, message: str, step: int, details: Optional[Dict[str, Any]] = None):
        super().__init__(f"step {step}: {message}", details)
        self.step = step
        self.reason = message
