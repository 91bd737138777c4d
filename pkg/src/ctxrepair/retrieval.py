"""Semantic retrieval: embed text, rank context entries by cosine similarity.

The index is an exhaustive-scan store (project indexes are small enough that
exactness beats approximate structures).  Two encoders are provided: a
deterministic local one (hashed token frequencies, signed, L2-normalized)
so the whole pipeline runs offline, and a remote HTTP embedding client
mirroring hosted text-embedding services (dimension 1536).
"""

from __future__ import annotations

import hashlib
import os
import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence, Union

import numpy as np
import requests

from .errors import EncoderUnavailableError
from .index.build import entry_schema_text
from .index.models import EmbedderInfo, ProjectDatabase

EMBEDDING_API_KEY_VAR = "CTXREPAIR_EMBEDDING_API_KEY"

REMOTE_EMBEDDING_DIM = 1536
LOCAL_EMBEDDING_DIM = 256

VectorLike = Union[np.ndarray, Sequence[float]]


class EmbeddingVector:
    """Fixed-length real vector; read-only after construction."""

    __slots__ = ("values",)

    def __init__(self, values: VectorLike):
        arr = np.array(values, dtype=np.float32)
        if arr.ndim != 1:
            raise ValueError("embedding vectors are one-dimensional")
        arr.flags.writeable = False
        self.values = arr

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])

    def __len__(self) -> int:
        return self.dim


def _as_array(v: Union[EmbeddingVector, VectorLike]) -> np.ndarray:
    if isinstance(v, EmbeddingVector):
        return v.values
    return np.asarray(v, dtype=np.float32)


def cosine(a: Union[EmbeddingVector, VectorLike], b: Union[EmbeddingVector, VectorLike]) -> float:
    """Cosine similarity in [-1, 1]; zero-norm inputs score 0 by definition."""
    va, vb = _as_array(a), _as_array(b)
    if va.shape != vb.shape:
        raise ValueError(f"dimension mismatch: {va.shape[0]} vs {vb.shape[0]}")
    va64 = va.astype(np.float64)
    vb64 = vb.astype(np.float64)
    norm = float(np.linalg.norm(va64) * np.linalg.norm(vb64))
    if norm == 0.0:
        return 0.0
    return float(np.dot(va64, vb64) / norm)


_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|\d+")


class LocalEmbedder:
    """Deterministic offline encoder: signed hashed token counts, L2-normalized.

    Exists so the pipeline and tests run without a network; retrieval quality
    is not a claim.  Parameters (dim, seed) are recorded in the database
    header so an index can always be re-queried consistently.
    """

    def __init__(self, dim: int = LOCAL_EMBEDDING_DIM, seed: int = 0):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        self.seed = seed

    def info(self) -> EmbedderInfo:
        return EmbedderInfo(kind="local", dim=self.dim, seed=self.seed)

    def _slot(self, token: str) -> tuple[int, float]:
        digest = hashlib.blake2b(
            token.encode("utf-8"), digest_size=8, salt=str(self.seed).encode()[:16]
        ).digest()
        value = int.from_bytes(digest, "big")
        sign = 1.0 if value & 1 else -1.0
        return (value >> 1) % self.dim, sign

    def encode(self, text: str) -> EmbeddingVector:
        if not text:
            raise ValueError("cannot encode empty text")
        vec = np.zeros(self.dim, dtype=np.float64)
        for token in _TOKEN_RE.findall(text.lower()):
            idx, sign = self._slot(token)
            vec[idx] += sign
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        return EmbeddingVector(vec)

    def __call__(self, text: str) -> np.ndarray:
        return self.encode(text).values


class RemoteEmbedder:
    """HTTP embedding client: POST {model, input: [texts]} -> {data: [{embedding}]}."""

    def __init__(
        self,
        endpoint: str,
        model: str,
        dim: int = REMOTE_EMBEDDING_DIM,
        api_key: Optional[str] = None,
        timeout: float = 60.0,
        session: Optional[requests.Session] = None,
    ):
        self.endpoint = endpoint
        self.model = model
        self.dim = dim
        self.api_key = api_key if api_key is not None else os.environ.get(EMBEDDING_API_KEY_VAR)
        self.timeout = timeout
        self._session = session or requests.Session()

    def info(self) -> EmbedderInfo:
        return EmbedderInfo(kind="remote", dim=self.dim, seed=0, model=self.model)

    def encode_batch(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = self._session.post(
                self.endpoint,
                json={"model": self.model, "input": list(texts)},
                headers=headers,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise EncoderUnavailableError(f"embedding service unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise EncoderUnavailableError(
                f"embedding service returned {resp.status_code}: {resp.text[:200]}"
            )
        try:
            data = resp.json()["data"]
            return [EmbeddingVector(item["embedding"]) for item in data]
        except (ValueError, KeyError, TypeError) as exc:
            raise EncoderUnavailableError(f"embedding response malformed: {exc}") from exc

    def encode(self, text: str) -> EmbeddingVector:
        if not text:
            raise ValueError("cannot encode empty text")
        return self.encode_batch([text])[0]

    def __call__(self, text: str) -> np.ndarray:
        return self.encode(text).values


Encoder = Union[LocalEmbedder, RemoteEmbedder, Callable[[str], EmbeddingVector]]


class RetrievalMode(str, Enum):
    INITIAL = "initial"        # task description, before any check
    SUBSEQUENT = "subsequent"  # error report plus the offending line


@dataclass(frozen=True)
class RetrievalQuery:
    text: str
    mode: RetrievalMode = RetrievalMode.INITIAL

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("retrieval query text must be nonempty")


class EmbeddingIndex:
    """Exhaustive-scan vector store over entry passages."""

    def __init__(
        self,
        rows: Sequence[tuple[int, VectorLike, str]],
        embedder: Optional[Encoder] = None,
    ):
        self.rows: list[tuple[int, np.ndarray, str]] = []
        seen: set[int] = set()
        dim: Optional[int] = None
        for entry_id, vec, passage in rows:
            arr = _as_array(vec)
            if entry_id in seen:
                raise ValueError(f"duplicate entry id in index: {entry_id}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite vector for entry {entry_id}")
            if dim is None:
                dim = arr.shape[0]
            elif arr.shape[0] != dim:
                raise ValueError("all index vectors must share one dimension")
            seen.add(entry_id)
            self.rows.append((entry_id, arr, passage))
        self.dim = dim
        self.embedder = embedder

    def __len__(self) -> int:
        return len(self.rows)

    @classmethod
    def from_database(
        cls, db: ProjectDatabase, embedder: Optional[Encoder] = None
    ) -> "EmbeddingIndex":
        """Index the database's stored embeddings; entries flagged at build
        time (missing embedding) are left out.

        When no embedder is supplied and the database was built with the
        local encoder, an equivalent one is reconstructed from the header.
        """
        if embedder is None:
            if db.embedder.kind == "local":
                embedder = LocalEmbedder(dim=db.embedder.dim, seed=db.embedder.seed)
            else:
                raise ValueError(
                    "database was built with a remote embedder; pass one explicitly"
                )
        rows = [
            (entry.id, db.embeddings[entry.id], entry_schema_text(entry))
            for entry in db.entries
            if db.embeddings[entry.id] is not None
        ]
        return cls(rows, embedder=embedder)


def top_n(
    q: RetrievalQuery,
    index: EmbeddingIndex,
    n: int,
    encoder: Optional[Encoder] = None,
) -> list[tuple[int, float]]:
    """The n entries most similar to the query, descending score.

    Ties break toward the lower entry id; an empty index yields an empty
    list.  The encoder defaults to the index's own embedder.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not index.rows:
        return []
    encoder = encoder or index.embedder
    if encoder is None:
        raise ValueError("no encoder available for query embedding")
    query_vec = encoder.encode(q.text) if hasattr(encoder, "encode") else encoder(q.text)
    scored = [(entry_id, cosine(query_vec, vec)) for entry_id, vec, _ in index.rows]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:n]
