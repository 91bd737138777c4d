"""External static-analyzer invocation.

Contract: spawn ``<analyzer> --output-format json <file>`` with the project
root as working directory and parse a JSON array of objects carrying
``{type, message-id, message, line, column, path}``.  Only error-severity
findings are kept; warnings, conventions, and refactors are dropped at parse
time.  Exit status is informational (analyzers exit nonzero when they report
findings).
"""

from __future__ import annotations

import json
import os
import subprocess
from dataclasses import dataclass
from pathlib import Path

from ..errors import ProtocolError, ToolUnavailableError
from .models import Diagnostic

DEFAULT_ANALYZER = "pylint"

#: Environment variable overriding the analyzer executable path.
ANALYZER_ENV_VAR = "CTXREPAIR_ANALYZER"


@dataclass
class CheckerConfig:
    """How to reach the external analyzer."""

    executable: str = DEFAULT_ANALYZER
    timeout: float = 120.0
    extra_args: tuple[str, ...] = ()

    @classmethod
    def from_env(cls) -> "CheckerConfig":
        return cls(executable=os.environ.get(ANALYZER_ENV_VAR, DEFAULT_ANALYZER))


def _parse_analyzer_output(stdout: str, fallback_file: str) -> list[Diagnostic]:
    try:
        records = json.loads(stdout) if stdout.strip() else []
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"analyzer produced unparseable output: {exc}") from exc
    if not isinstance(records, list):
        raise ProtocolError("analyzer output is not a JSON array")

    diags: list[Diagnostic] = []
    for rec in records:
        if not isinstance(rec, dict):
            raise ProtocolError(f"analyzer record is not an object: {rec!r}")
        if rec.get("type") != "error":
            continue
        diags.append(
            Diagnostic.from_checker(
                code=str(rec.get("message-id", "")),
                message=str(rec.get("message", "")),
                file=str(rec.get("path", fallback_file)),
                line=int(rec.get("line", 1)),
                column=int(rec.get("column", 0)),
            )
        )
    return diags


def run_external_checker(
    file: str | os.PathLike,
    project_root: str | os.PathLike,
    config: CheckerConfig | None = None,
) -> list[Diagnostic]:
    """Analyze one file in its project and return error-severity findings.

    Raises ToolUnavailableError when the analyzer cannot be spawned and
    ProtocolError when its output violates the documented JSON contract.
    """
    config = config or CheckerConfig.from_env()
    file_path = Path(file)
    root = Path(project_root)
    try:
        rel = file_path.resolve().relative_to(root.resolve())
    except ValueError:
        raise ToolUnavailableError(f"{file_path} is not inside project root {root}")

    argv = [config.executable, "--output-format", "json", *config.extra_args, str(rel)]
    try:
        proc = subprocess.run(
            argv,
            cwd=str(root),
            capture_output=True,
            text=True,
            timeout=config.timeout,
        )
    except FileNotFoundError as exc:
        raise ToolUnavailableError(
            f"analyzer executable not found: {config.executable}"
        ) from exc
    except subprocess.TimeoutExpired as exc:
        raise ToolUnavailableError(f"analyzer timed out after {config.timeout}s") from exc

    return _parse_analyzer_output(proc.stdout, str(rel))
