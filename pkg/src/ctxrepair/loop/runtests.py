"""Test execution for finished candidates.

Runs after the static loop, for evaluation only: failures become FUNC
findings that are counted in distributions but never fed back into
retrieval.
"""

from __future__ import annotations

import subprocess
from typing import Optional

from ..diagnostics.models import Diagnostic, func_diagnostic
from .models import Candidate, GenerationTask

_OUTPUT_TAIL = 400


def run_task_tests(
    candidate: Candidate,
    task: GenerationTask,
    cwd: Optional[str] = None,
    timeout: float = 30.0,
) -> list[Diagnostic]:
    """Execute the task's test command in a child process with a timeout.

    Returns [] on pass; a failing or timed-out run yields one FUNC finding.
    """
    if not task.test_command:
        return []
    line = task.insertion_span[0]
    try:
        proc = subprocess.run(
            task.test_command,
            shell=True,
            cwd=cwd,
            capture_output=True,
            text=True,
            timeout=timeout,
        )
    except subprocess.TimeoutExpired:
        return [
            func_diagnostic(
                f"test command timed out after {timeout}s",
                file=task.target_file,
                line=line,
                subtype="timeout",
            )
        ]
    if proc.returncode == 0:
        return []
    tail = (proc.stderr or proc.stdout or "").strip()[-_OUTPUT_TAIL:]
    return [
        func_diagnostic(
            f"test command failed (exit {proc.returncode}): {tail}",
            file=task.target_file,
            line=line,
        )
    ]
