"""Completion backends: a remote chat service and a deterministic replay mock.

Every ``complete`` call may be appended to an audit transcript (prompt,
config, responses) for later inspection; the log serializes writers
internally so backends can be called concurrently.
"""

from __future__ import annotations

import abc
import hashlib
import json
import logging
import os
import threading
import time
from pathlib import Path
from typing import Optional, Sequence

import requests

from ..errors import BackendUnavailableError, ConfigError
from .config import GenerationConfig

logger = logging.getLogger(__name__)

COMPLETION_API_KEY_VAR = "CTXREPAIR_COMPLETION_API_KEY"


def prompt_digest(text: str) -> str:
    """Short stable digest used in transcripts and iteration traces."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]


class AuditLog:
    """Append-only JSON-lines record of every backend call."""

    def __init__(self, path: str | os.PathLike):
        self._path = Path(path)
        self._lock = threading.Lock()

    def record(self, prompt: str, config: GenerationConfig, responses: Sequence[str]) -> None:
        line = json.dumps(
            {
                "prompt_digest": prompt_digest(prompt),
                "prompt": prompt,
                "config": config.to_json(),
                "responses": list(responses),
            },
            sort_keys=True,
        )
        with self._lock:
            with open(self._path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")


class CompletionBackend(abc.ABC):
    """Black-box completion interface."""

    audit: Optional[AuditLog] = None

    @abc.abstractmethod
    def complete(self, prompt: str, config: GenerationConfig) -> list[str]:
        """Return ``config.n_samples`` response texts for the prompt."""

    def _record(self, prompt: str, config: GenerationConfig, responses: Sequence[str]) -> None:
        if self.audit is not None:
            self.audit.record(prompt, config, responses)


class MockBackend(CompletionBackend):
    """Replays a fixture transcript, keyed by request ordinal.

    Transcript file format: a JSON list of records
    ``{"ordinal": int, "expected_prompt_digest": str?, "responses": [str, ...]}``.
    A digest mismatch logs a warning rather than failing, since prompt edits
    should not invalidate an entire recorded scenario.
    """

    def __init__(self, records: Sequence[dict], audit: Optional[AuditLog] = None):
        self._by_ordinal = {int(rec["ordinal"]): rec for rec in records}
        self._calls = 0
        self._lock = threading.Lock()
        self.audit = audit

    @classmethod
    def from_file(cls, path: str | os.PathLike, audit: Optional[AuditLog] = None) -> "MockBackend":
        with open(path, "r", encoding="utf-8") as fh:
            records = json.load(fh)
        if not isinstance(records, list):
            raise ConfigError(f"transcript {path} is not a JSON list")
        return cls(records, audit=audit)

    def complete(self, prompt: str, config: GenerationConfig) -> list[str]:
        with self._lock:
            ordinal = self._calls
            self._calls += 1
        record = self._by_ordinal.get(ordinal)
        if record is None:
            raise BackendUnavailableError(
                f"mock transcript exhausted: no record for request ordinal {ordinal}"
            )
        expected = record.get("expected_prompt_digest")
        if expected and expected != prompt_digest(prompt):
            logger.warning(
                "transcript ordinal %d expected prompt digest %s, got %s",
                ordinal,
                expected,
                prompt_digest(prompt),
            )
        responses = [str(r) for r in record["responses"]]
        self._record(prompt, config, responses)
        return responses


class RemoteChatBackend(CompletionBackend):
    """HTTP chat-completion client with retry/backoff on transient failures."""

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key: Optional[str] = None,
        audit: Optional[AuditLog] = None,
        max_attempts: int = 3,
        timeout: float = 120.0,
        session: Optional[requests.Session] = None,
    ):
        self.endpoint = endpoint
        self.model = model
        self.api_key = api_key if api_key is not None else os.environ.get(COMPLETION_API_KEY_VAR)
        if not self.api_key:
            raise ConfigError(
                f"remote completion backend selected but {COMPLETION_API_KEY_VAR} is not set"
            )
        self.audit = audit
        self.max_attempts = max_attempts
        self.timeout = timeout
        self._session = session or requests.Session()

    def complete(self, prompt: str, config: GenerationConfig) -> list[str]:
        payload: dict = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": config.temperature,
            "n": config.n_samples,
            "max_tokens": config.max_new_tokens,
        }
        if config.top_k is not None:
            payload["top_k"] = config.top_k

        last_error: Optional[Exception] = None
        for attempt in range(self.max_attempts):
            if attempt:
                time.sleep(2 ** (attempt - 1))
            try:
                resp = self._session.post(
                    self.endpoint,
                    json=payload,
                    headers={"Authorization": f"Bearer {self.api_key}"},
                    timeout=self.timeout,
                )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last_error = BackendUnavailableError(
                    f"completion service returned {resp.status_code}"
                )
                continue
            if resp.status_code != 200:
                raise BackendUnavailableError(
                    f"completion service returned {resp.status_code}: {resp.text[:200]}"
                )
            try:
                data = resp.json()
                responses = [c["message"]["content"] for c in data["choices"]]
            except (ValueError, KeyError, TypeError) as exc:
                raise BackendUnavailableError(
                    f"completion service response malformed: {exc}"
                ) from exc
            self._record(prompt, config, responses)
            return responses
        raise BackendUnavailableError(
            f"completion service unreachable after {self.max_attempts} attempts: {last_error}"
        )
