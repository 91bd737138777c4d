"""Iterative repair orchestration."""

from .engine import assemble_feedback, repair
from .models import (
    Candidate,
    CandidateStatus,
    GenerationTask,
    IterationTrace,
    LoopConfig,
    read_traces_jsonl,
    write_traces_jsonl,
)
from .runtests import run_task_tests

__all__ = [
    "Candidate",
    "CandidateStatus",
    "GenerationTask",
    "IterationTrace",
    "LoopConfig",
    "assemble_feedback",
    "read_traces_jsonl",
    "repair",
    "run_task_tests",
    "write_traces_jsonl",
]
