from typing import Any, Dict, Optional


class QTreeError(Exception):
    """Base class for every error raised by qtree."""


class InvalidParameterError(QTreeError, ValueError):
    """A depth, node count, Werner parameter or option is out of range."""


class SizeGuardError(QTreeError):
    """An enumeration was refused because the tree is too large."""

    def __init__(self, message: str, nodes: Optional[int] = None):
        super().__init__(message)
        self.nodes = nodes


class StateValidationError(QTreeError, ValueError):
    """A density matrix broke a Hermiticity, trace or positivity check."""


class VerificationError(QTreeError):
    """One failed invariant of the verify suite, with the failing case attached."""

    def __init__(self, check: str, case: Dict[str, Any], detail: str):
        self.check = check
        self.case = dict(case)
        self.detail = detail
        where = ", ".join(f"{k}={v}" for k, v in self.case.items())
        super().__init__(f"{check} failed at ({where}): {detail}")
