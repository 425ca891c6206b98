"""
Exception hierarchy for eh-certify.

Library code raises these; only the command-line front end catches them and
maps them onto exit codes (1 usage, 2 diagnostic).
"""

from typing import Any, Dict, Optional


class EHCertifyError(Exception):
    """Base class for every error raised by this package"""


class ParameterError(EHCertifyError, ValueError):
    """Invalid shape, schedule or override parameters"""


class SizeError(EHCertifyError, ValueError):
    """An input exceeds a hard size cap or is too small to partition"""


class DomainError(EHCertifyError, ValueError):
    """An input lies outside an operation's domain (e.g. not a caterpillar)"""


class PreconditionError(EHCertifyError, ValueError):
    """An eagerly checked precondition of an algorithm does not hold"""


class ParseError(EHCertifyError, ValueError):
    """Malformed graph file"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MalformedCertificateError(EHCertifyError, ValueError):
    """Certificate refers to vertices outside the host or misses fields"""


class DiagnosticFailure(EHCertifyError, RuntimeError):
    """No certificate could be produced; carries what was learned"""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InfeasibleError(DiagnosticFailure):
    """A step whose existence the proof guarantees failed on this input"""


class SparsifyFailure(DiagnosticFailure):
    """Neither a clean side nor a pattern witness was found"""


class InvariantViolation(EHCertifyError, AssertionError):
    """Internal soundness violation; the offending output is never emitted"""
