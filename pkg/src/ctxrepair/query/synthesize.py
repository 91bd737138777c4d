"""LLM-backed query synthesis for codes outside the hard-coded set."""

from __future__ import annotations

import logging

from ..diagnostics.models import Diagnostic
from ..errors import (
    BackendUnavailableError,
    EmptyCompletionError,
    QueryRejectedError,
    QuerySyntaxError,
)
from ..gateway.backends import CompletionBackend
from ..gateway.config import GenerationConfig
from ..gateway.extract import extract_code
from ..gateway.prompts import render_query_prompt
from .lang import StructuralQuery
from .parser import parse_query

logger = logging.getLogger(__name__)


def synthesize_query(
    diag: Diagnostic,
    backend: CompletionBackend,
    config: GenerationConfig | None = None,
) -> StructuralQuery:
    """Prompt the backend with the fixed demonstrations plus this error message.

    Raises QueryRejectedError when the completion does not parse as a query;
    callers then fall back to semantic retrieval alone.
    """
    config = (config or GenerationConfig()).with_samples(1)
    bundle = render_query_prompt(diag)
    try:
        responses = backend.complete(bundle.rendered, config)
    except BackendUnavailableError:
        raise
    if not responses:
        raise QueryRejectedError("backend returned no completions for query synthesis")
    try:
        text = extract_code(responses[0])
        return parse_query(text)
    except (QuerySyntaxError, EmptyCompletionError) as exc:
        logger.info("synthesized query rejected: %s", exc)
        raise QueryRejectedError(f"completion did not parse as a structural query: {exc}") from exc
