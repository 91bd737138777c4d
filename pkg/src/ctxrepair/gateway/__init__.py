"""Prompt rendering, completion backends, and response post-processing."""

from .backends import (
    COMPLETION_API_KEY_VAR,
    AuditLog,
    CompletionBackend,
    MockBackend,
    RemoteChatBackend,
    prompt_digest,
)
from .config import GenerationConfig
from .extract import extract_code
from .prompts import (
    QUERY_DEMONSTRATIONS,
    TRUNCATION_MARKER,
    ContextSnippet,
    PromptBundle,
    PromptKind,
    render_generation_prompt,
    render_query_prompt,
)

__all__ = [
    "COMPLETION_API_KEY_VAR",
    "AuditLog",
    "CompletionBackend",
    "ContextSnippet",
    "GenerationConfig",
    "MockBackend",
    "PromptBundle",
    "PromptKind",
    "QUERY_DEMONSTRATIONS",
    "RemoteChatBackend",
    "TRUNCATION_MARKER",
    "extract_code",
    "prompt_digest",
    "render_generation_prompt",
    "render_query_prompt",
]
