"""Tasks, candidates, traces, and loop configuration."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from ..diagnostics.models import CheckReport, Diagnostic


@dataclass(frozen=True)
class GenerationTask:
    """One generation request: fill ``insertion_span`` of ``target_file``.

    ``insertion_span`` is 1-based inclusive; ``test_command`` (optional) is
    executed only after the static loop finishes, for evaluation.
    """

    id: str
    requirement: str
    target_file: str
    insertion_span: tuple[int, int]
    signature_stub: Optional[str] = None
    test_command: Optional[str] = None

    def __post_init__(self) -> None:
        start, end = self.insertion_span
        if start < 1 or end < start:
            raise ValueError(f"invalid insertion span: {self.insertion_span}")

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "requirement": self.requirement,
            "target_file": self.target_file,
            "insertion_span": list(self.insertion_span),
            "signature_stub": self.signature_stub,
            "test_command": self.test_command,
        }

    @classmethod
    def from_json(cls, data: dict) -> "GenerationTask":
        return cls(
            id=str(data["id"]),
            requirement=data["requirement"],
            target_file=data["target_file"],
            insertion_span=tuple(data["insertion_span"]),  # type: ignore[arg-type]
            signature_stub=data.get("signature_stub"),
            test_command=data.get("test_command"),
        )

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "GenerationTask":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


class CandidateStatus(str, Enum):
    CLEAN = "clean"
    FAILING = "failing"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class Candidate:
    """One solution attempt with its latest check outcome."""

    code: str
    iteration: int
    report: CheckReport
    status: CandidateStatus

    @property
    def clean(self) -> bool:
        return self.status == CandidateStatus.CLEAN


@dataclass(frozen=True)
class IterationTrace:
    """Audit record of one refine cycle for one candidate."""

    iteration: int
    candidate_index: int
    prompt_digest: str
    structural_query: Optional[str]
    structural_tuple_count: int
    semantic_results: tuple[tuple[int, float], ...]
    diagnostics_before: tuple[Diagnostic, ...]
    diagnostics_after: tuple[Diagnostic, ...]
    candidate_digest: str

    def to_json(self) -> dict:
        return {
            "iteration": self.iteration,
            "candidate_index": self.candidate_index,
            "prompt_digest": self.prompt_digest,
            "structural_query": self.structural_query,
            "structural_tuple_count": self.structural_tuple_count,
            "semantic_results": [[i, s] for i, s in self.semantic_results],
            "diagnostics_before": [d.to_json() for d in self.diagnostics_before],
            "diagnostics_after": [d.to_json() for d in self.diagnostics_after],
            "candidate_digest": self.candidate_digest,
        }

    @classmethod
    def from_json(cls, data: dict) -> "IterationTrace":
        return cls(
            iteration=data["iteration"],
            candidate_index=data["candidate_index"],
            prompt_digest=data["prompt_digest"],
            structural_query=data.get("structural_query"),
            structural_tuple_count=data.get("structural_tuple_count", 0),
            semantic_results=tuple((i, s) for i, s in data.get("semantic_results", [])),
            diagnostics_before=tuple(
                Diagnostic.from_json(d) for d in data.get("diagnostics_before", [])
            ),
            diagnostics_after=tuple(
                Diagnostic.from_json(d) for d in data.get("diagnostics_after", [])
            ),
            candidate_digest=data["candidate_digest"],
        )


def write_traces_jsonl(traces, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for trace in traces:
            fh.write(json.dumps(trace.to_json(), sort_keys=True) + "\n")


def read_traces_jsonl(path) -> list[IterationTrace]:
    traces = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                traces.append(IterationTrace.from_json(json.loads(line)))
    return traces


@dataclass(frozen=True)
class LoopConfig:
    """Loop-level knobs: 3 refinement rounds, 20 candidates, 5 retrievals."""

    max_iterations: int = 3
    n_candidates: int = 20
    retrieval_n: int = 5
    checker: str = "builtin"  # "builtin" | "external"
    fallback_to_builtin: bool = True
    test_timeout: float = 30.0

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.n_candidates < 1:
            raise ValueError("n_candidates must be >= 1")
        if self.retrieval_n < 1:
            raise ValueError("retrieval_n must be >= 1")
        if self.checker not in ("builtin", "external"):
            raise ValueError(f"unknown checker: {self.checker!r}")

    def to_json(self) -> dict:
        return {
            "max_iterations": self.max_iterations,
            "n_candidates": self.n_candidates,
            "retrieval_n": self.retrieval_n,
            "checker": self.checker,
            "fallback_to_builtin": self.fallback_to_builtin,
            "test_timeout": self.test_timeout,
        }
