"""Exception types shared across the pipeline."""

from __future__ import annotations


class CtxRepairError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(CtxRepairError):
    """Invalid or incomplete run configuration."""


class ToolUnavailableError(CtxRepairError):
    """An external tool (analyzer, backend) could not be spawned or reached."""


class ProtocolError(CtxRepairError):
    """An external tool produced output that violates its documented contract."""


class QuerySyntaxError(CtxRepairError):
    """A structural query failed to parse.

    Carries the offending query text and a character position so callers
    can point at the error.
    """

    def __init__(self, message: str, text: str = "", position: int = -1):
        self.text = text
        self.position = position
        if position >= 0 and text:
            message = f"{message} (at position {position}: ...{text[position:position + 20]!r})"
        super().__init__(message)


class QueryRejectedError(CtxRepairError):
    """A synthesized structural query could not be parsed into the clause form."""


class EncoderUnavailableError(CtxRepairError):
    """The remote embedding service failed; caller may retry or fall back."""


class BackendUnavailableError(CtxRepairError):
    """The completion backend failed or its replay transcript is exhausted."""


class BudgetExceededError(CtxRepairError):
    """A prompt cannot fit its character budget even before adding context."""


class EmptyCompletionError(CtxRepairError):
    """Code extraction produced an empty result."""
