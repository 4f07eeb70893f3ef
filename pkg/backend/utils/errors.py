"""
Exception hierarchy for the certifier
Every error carries a machine code so the API handlers and the CLI can map it
the same way (HTTP status / exit code) without string matching
"""
from typing import Optional


class CertifierError(Exception):
    """Base class - everything we raise on purpose derives from this"""

    code = "CERTIFIER_ERROR"
    status_code = 400

    def __init__(self, message: str, reason: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.reason = reason

    def to_dict(self) -> dict:
        payload = {"error": self.code, "message": self.message}
        if self.reason:
            payload["reason"] = self.reason
        return payload


class GraphFormatError(CertifierError, ValueError):
    """
    Bad graph input (graph6, edge list, triangle-tree steps)
    `reason` tells the failure apart: malformed_header, invalid_character,
    trailing_bits, length_mismatch, vertex_cap, self_loop, duplicate_edge,
    non_integer, bad_line, vertex_out_of_range, empty_input, dangling_index
    """

    code = "GRAPH_FORMAT_ERROR"


class BudgetExceededError(CertifierError):
    """An enumeration would go past the configured budget"""

    code = "BUDGET_EXCEEDED"
    status_code = 413


class PreconditionError(CertifierError, ValueError):
    """Arguments are well-formed but violate an operation's precondition"""

    code = "PRECONDITION_FAILED"


class NotApplicableError(PreconditionError):
    """The graph is outside the theorem's reach (no triangle, or just K3)"""

    code = "NOT_APPLICABLE"


class InternalInconsistencyError(CertifierError):
    """Something that the math guarantees did not happen - always a bug"""

    code = "INTERNAL_INCONSISTENCY"
    status_code = 500
