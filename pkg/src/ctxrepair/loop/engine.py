"""The iterative generate / check / retrieve / regenerate cycle.

Iteration 0 samples n candidates from the task description plus semantic
context.  Every failing candidate is then refined independently, round by
round: its diagnostics drive a structural lookup (table-driven for frequent
codes, synthesized otherwise) and a fresh semantic retrieval, and the
backend regenerates with the prior solution and compiler feedback inlined.
Clean candidates freeze; the loop stops when all are clean or the refinement
cap is reached.  Runtime (FUNC) failures never enter retrieval.
"""

from __future__ import annotations

import logging
import shutil
import tempfile
from pathlib import Path
from typing import Optional, Sequence

from ..diagnostics.builtin import builtin_check
from ..diagnostics.external import CheckerConfig, run_external_checker
from ..diagnostics.models import (
    CheckReport,
    Diagnostic,
    filter_to_solution,
    is_repairable,
    order_dominant_first,
)
from ..errors import (
    BackendUnavailableError,
    EmptyCompletionError,
    QueryRejectedError,
    ToolUnavailableError,
)
from ..gateway.backends import CompletionBackend, prompt_digest
from ..gateway.config import GenerationConfig
from ..gateway.extract import extract_code
from ..gateway.prompts import ContextSnippet, render_generation_prompt
from ..index.models import ProjectDatabase
from ..query.hardcoded import hardcoded_query_for
from ..query.run import QueryResult, execute_query, render_entry
from ..query.synthesize import synthesize_query
from ..retrieval import (
    EmbeddingIndex,
    RetrievalMode,
    RetrievalQuery,
    top_n,
)
from .models import Candidate, CandidateStatus, GenerationTask, IterationTrace, LoopConfig

logger = logging.getLogger(__name__)

MAX_FEEDBACK_DIAGNOSTICS = 5


def assemble_feedback(report: CheckReport, source_text: Optional[str] = None) -> str:
    """Feedback block for the next prompt: up to five findings, dominant first.

    Each line reads ``code message (line N): <offending source line>``; the
    source excerpt is included when the checked file text is supplied.
    """
    if report.clean:
        raise ValueError("cannot assemble feedback from a clean report")
    lines = source_text.splitlines() if source_text is not None else []
    out = []
    for diag in order_dominant_first(report)[:MAX_FEEDBACK_DIAGNOSTICS]:
        entry = f"{diag.code} {diag.message} (line {diag.line})"
        if 1 <= diag.line <= len(lines):
            entry += f": {lines[diag.line - 1].strip()}"
        out.append(entry)
    return "\n".join(out)


class _Workspace:
    """Per-task staging: a disposable copy of the project tree.

    Candidates are spliced into the copy's target file so external checkers
    and test commands see a real project; the user's checkout is never
    touched, which keeps concurrent tasks independent.
    """

    def __init__(self, project_root: str, task: GenerationTask):
        self._tmp = tempfile.mkdtemp(prefix="ctxrepair-")
        self.root = Path(self._tmp) / "project"
        shutil.copytree(project_root, self.root, symlinks=False)
        self.target = self.root / task.target_file
        if not self.target.is_file():
            raise FileNotFoundError(f"task target file not found: {task.target_file}")
        self._original_lines = self.target.read_text(encoding="utf-8").splitlines()
        start, end = task.insertion_span
        if end > len(self._original_lines) + 1:
            raise ValueError(
                f"insertion span {task.insertion_span} exceeds target file "
                f"({len(self._original_lines)} lines)"
            )
        self.span = (start, end)

    def compose(self, code: str) -> tuple[str, tuple[int, int]]:
        """File text with the candidate spliced in, and the solution span."""
        code_lines = code.splitlines() or [""]
        start, end = self.span
        merged = self._original_lines[: start - 1] + code_lines + self._original_lines[end:]
        solution_span = (start, start + len(code_lines) - 1)
        return "\n".join(merged) + "\n", solution_span

    def write(self, code: str) -> tuple[Path, tuple[int, int]]:
        text, solution_span = self.compose(code)
        self.target.write_text(text, encoding="utf-8")
        return self.target, solution_span

    def cleanup(self) -> None:
        shutil.rmtree(self._tmp, ignore_errors=True)


def _check_candidate(
    code: str,
    workspace: _Workspace,
    task: GenerationTask,
    db: ProjectDatabase,
    config: LoopConfig,
    checker_config: Optional[CheckerConfig],
) -> tuple[CheckReport, str]:
    """Check one candidate; returns the report and the composed file text."""
    text, solution_span = workspace.compose(code)
    if config.checker == "external":
        try:
            path, solution_span = workspace.write(code)
            diags = run_external_checker(path, workspace.root, checker_config)
            return filter_to_solution(diags, solution_span), text
        except ToolUnavailableError:
            if not config.fallback_to_builtin:
                raise
            logger.warning("external analyzer unavailable; falling back to builtin checker")
    diags = builtin_check(text, solution_span, db, file=task.target_file)
    return filter_to_solution(diags, solution_span), text


def _structural_context(
    diag: Diagnostic,
    db: ProjectDatabase,
    backend: CompletionBackend,
    gen_config: GenerationConfig,
) -> tuple[Optional[QueryResult], Optional[str]]:
    result = hardcoded_query_for(diag, db)
    if result is not None:
        return result, f"hardcoded:{diag.code}"
    try:
        query = synthesize_query(diag, backend, gen_config)
    except QueryRejectedError:
        return None, None
    return execute_query(query, db), query.render()


def _snippets_from_result(db: ProjectDatabase, result: Optional[QueryResult]) -> list[ContextSnippet]:
    if result is None:
        return []
    snippets = []
    for row, rendered in zip(result.tuples, result.rendered):
        snippets.append(ContextSnippet(text=rendered, entry_id=row[0], origin="structural"))
    return snippets


def _semantic_snippets(
    db: ProjectDatabase, hits: Sequence[tuple[int, float]]
) -> list[ContextSnippet]:
    return [
        ContextSnippet(
            text=render_entry(db, db.entry(entry_id), include_source=True),
            entry_id=entry_id,
            origin="semantic",
        )
        for entry_id, _ in hits
    ]


def _extract_or_empty(response: str) -> str:
    try:
        return extract_code(response)
    except EmptyCompletionError:
        return ""


def repair(
    task: GenerationTask,
    db: ProjectDatabase,
    backend: CompletionBackend,
    config: LoopConfig | None = None,
    gen_config: GenerationConfig | None = None,
    embedding_index: Optional[EmbeddingIndex] = None,
    checker_config: Optional[CheckerConfig] = None,
) -> tuple[list[Candidate], list[IterationTrace]]:
    """Run the full repair loop for one task.

    Returns the final candidates (statuses assigned) and the per-iteration
    traces, ordered by (iteration, candidate index).  With a replay backend
    the entire run is deterministic.
    """
    config = config or LoopConfig()
    gen_config = gen_config or GenerationConfig()
    index = embedding_index or EmbeddingIndex.from_database(db)

    task_text = task.requirement
    if task.signature_stub:
        task_text = f"{task.requirement}\n\n{task.signature_stub}"

    workspace = _Workspace(db.project_root, task)
    traces: list[IterationTrace] = []
    try:
        # Iteration 0: generate n candidates from the task description.
        initial_hits = top_n(
            RetrievalQuery(task_text, RetrievalMode.INITIAL), index, config.retrieval_n
        )
        bundle = render_generation_prompt(
            task_text,
            _semantic_snippets(db, initial_hits),
            char_budget=gen_config.prompt_char_budget,
        )
        responses = backend.complete(
            bundle.rendered, gen_config.with_samples(config.n_candidates)
        )
        if not responses:
            raise BackendUnavailableError("backend returned no completions for iteration 0")
        candidates: list[Candidate] = []
        for idx, response in enumerate(responses[: config.n_candidates]):
            code = _extract_or_empty(response)
            report, _ = _check_candidate(code, workspace, task, db, config, checker_config)
            status = CandidateStatus.CLEAN if report.clean else CandidateStatus.FAILING
            candidates.append(Candidate(code=code, iteration=0, report=report, status=status))
            traces.append(
                IterationTrace(
                    iteration=0,
                    candidate_index=idx,
                    prompt_digest=prompt_digest(bundle.rendered),
                    structural_query=None,
                    structural_tuple_count=0,
                    semantic_results=tuple(initial_hits),
                    diagnostics_before=(),
                    diagnostics_after=report.solution_diagnostics,
                    candidate_digest=prompt_digest(code),
                )
            )

        # Refinement rounds: failing candidates regenerate independently.
        for iteration in range(1, config.max_iterations + 1):
            failing = [
                i for i, c in enumerate(candidates) if c.status == CandidateStatus.FAILING
            ]
            if not failing:
                break
            for idx in failing:
                candidate = candidates[idx]
                repairable = [
                    d for d in order_dominant_first(candidate.report) if is_repairable(d)
                ]
                if not repairable:
                    continue
                primary = repairable[0]
                composed, _ = workspace.compose(candidate.code)
                feedback = assemble_feedback(candidate.report, source_text=composed)

                structural_result, query_text = _structural_context(
                    primary, db, backend, gen_config
                )
                composed_lines = composed.splitlines()
                error_line = (
                    composed_lines[primary.line - 1].strip()
                    if 1 <= primary.line <= len(composed_lines)
                    else ""
                )
                sem_query = RetrievalQuery(
                    f"{primary.message}\n{error_line}".strip(), RetrievalMode.SUBSEQUENT
                )
                sem_hits = top_n(sem_query, index, config.retrieval_n)

                contexts = _snippets_from_result(db, structural_result) + _semantic_snippets(
                    db, sem_hits
                )
                bundle = render_generation_prompt(
                    task_text,
                    contexts,
                    prior_solution=candidate.code,
                    feedback=feedback,
                    char_budget=gen_config.prompt_char_budget,
                )
                responses = backend.complete(bundle.rendered, gen_config.with_samples(1))
                new_code = _extract_or_empty(responses[0]) if responses else ""
                report, _ = _check_candidate(
                    new_code, workspace, task, db, config, checker_config
                )
                status = (
                    CandidateStatus.CLEAN if report.clean else CandidateStatus.FAILING
                )
                candidates[idx] = Candidate(
                    code=new_code, iteration=iteration, report=report, status=status
                )
                traces.append(
                    IterationTrace(
                        iteration=iteration,
                        candidate_index=idx,
                        prompt_digest=prompt_digest(bundle.rendered),
                        structural_query=query_text,
                        structural_tuple_count=(
                            len(structural_result) if structural_result is not None else 0
                        ),
                        semantic_results=tuple(sem_hits),
                        diagnostics_before=candidate.report.solution_diagnostics,
                        diagnostics_after=report.solution_diagnostics,
                        candidate_digest=prompt_digest(new_code),
                    )
                )

        candidates = [
            Candidate(c.code, c.iteration, c.report, CandidateStatus.EXHAUSTED)
            if c.status == CandidateStatus.FAILING
            else c
            for c in candidates
        ]
        return candidates, traces
    finally:
        workspace.cleanup()
