"""Exception hierarchy shared by every subsystem.

Each error carries a stable machine-readable ``code`` (used verbatim by the
HTTP layer) and an optional ``details`` payload for witnesses and field paths.
"""

from __future__ import annotations

from typing import Any, Optional


class SecplannerError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "internal_error"

    def __init__(self, message: str, *, details: Optional[dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class InvalidInput(SecplannerError):
    """A caller violated a documented precondition."""

    code = "invalid_input"
