"""The two prompt families: code generation and query synthesis.

Rendering is a pure function of the segment list, so identical inputs yield
byte-identical prompts.  Context snippets are laid out structural-first and
deduplicated by entry id; when the character budget overflows, snippets are
dropped from the end (semantic results sit last) and a marker line records
the truncation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from ..diagnostics.models import Diagnostic
from ..errors import BudgetExceededError
from .config import DEFAULT_PROMPT_CHAR_BUDGET

TRUNCATION_MARKER = "# [further project context omitted to fit the prompt budget]"

#: Demonstration pairs (checker message, structural query) shown to the
#: backend before a new error message during query synthesis.
QUERY_DEMONSTRATIONS: tuple[tuple[str, str], ...] = (
    (
        "Unable to import 'keys'",
        "FROM Module m WHERE m.inSource() SELECT m",
    ),
    (
        "Instance of 'RootLogger' has no 'loggerDict' member",
        "from Module m, Class c, Function cf where m.inSource() and m.contains(c) "
        "and c.contains(cf) and cf.getScope() = c and c.getName = 'RootLogger' "
        "and not cf.isInitMethod() select m, c, cf",
    ),
    (
        "No name 'AsyncBolt5x0' in module 'neo4j._sync.io._bolt5'",
        "from Module m, Variable v where m.inSource() and v.getScope() = m "
        "and m.getName() = 'neo4j._sync.io._bolt5' select m, v.getDefinition()",
    ),
    (
        "No value for argument 'xmls' in function call 'dumpXML'",
        "from Module m, Function f where m.inSource() and m.contains(f) "
        "and f.getName() = 'dumpXML' select m, f",
    ),
)


class PromptKind(str, Enum):
    GENERATION = "generation"
    QUERY_SYNTHESIS = "query_synthesis"


@dataclass(frozen=True)
class ContextSnippet:
    """One retrieved context passage headed for a prompt."""

    text: str
    entry_id: Optional[int] = None
    origin: str = "semantic"  # "structural" | "semantic"


@dataclass(frozen=True)
class PromptBundle:
    kind: PromptKind
    segments: tuple[tuple[str, str], ...]
    rendered: str

    def __len__(self) -> int:
        return len(self.rendered)


_SEGMENT_HEADERS = {
    "task": "### Task",
    "context": "### Project context",
    "prior_solution": "### Previous solution",
    "feedback": "### Compiler feedback",
}

_GENERATION_FOOTER = "Write the complete solution code. Output only code."


def _render_generation(segments: Sequence[tuple[str, str]]) -> str:
    blocks: list[str] = []
    context_open = False
    for label, text in segments:
        if label == "context" or label == "truncation":
            if not context_open:
                blocks.append(_SEGMENT_HEADERS["context"])
                context_open = True
            blocks.append(text)
        else:
            context_open = False
            blocks.append(f"{_SEGMENT_HEADERS[label]}\n{text}")
    blocks.append(_GENERATION_FOOTER)
    return "\n\n".join(blocks)


def _ordered_unique_snippets(contexts: Sequence[ContextSnippet]) -> list[ContextSnippet]:
    structural = [c for c in contexts if c.origin == "structural"]
    semantic = [c for c in contexts if c.origin != "structural"]
    seen: set[int] = set()
    ordered: list[ContextSnippet] = []
    for snippet in structural + semantic:
        if snippet.entry_id is not None:
            if snippet.entry_id in seen:
                continue
            seen.add(snippet.entry_id)
        ordered.append(snippet)
    return ordered


def render_generation_prompt(
    task: str,
    contexts: Sequence[ContextSnippet] = (),
    prior_solution: Optional[str] = None,
    feedback: Optional[str] = None,
    char_budget: int = DEFAULT_PROMPT_CHAR_BUDGET,
) -> PromptBundle:
    """Build the code-generation prompt for one iteration.

    The first iteration passes no prior solution or feedback.  Raises
    BudgetExceededError when even the context-free prompt cannot fit.
    """
    if not task.strip():
        raise ValueError("task requirement must be nonempty")

    fixed: list[tuple[str, str]] = [("task", task)]
    if prior_solution is not None:
        fixed.append(("prior_solution", prior_solution))
    if feedback is not None:
        fixed.append(("feedback", feedback))

    def assemble(snippets: list[ContextSnippet], truncated: bool) -> tuple:
        segments: list[tuple[str, str]] = [("task", task)]
        segments.extend(("context", s.text) for s in snippets)
        if truncated:
            segments.append(("truncation", TRUNCATION_MARKER))
        if prior_solution is not None:
            segments.append(("prior_solution", prior_solution))
        if feedback is not None:
            segments.append(("feedback", feedback))
        return tuple(segments), _render_generation(segments)

    snippets = _ordered_unique_snippets(contexts)
    segments, rendered = assemble(snippets, truncated=False)
    truncated = False
    while len(rendered) > char_budget and snippets:
        snippets = snippets[:-1]
        truncated = True
        segments, rendered = assemble(snippets, truncated=truncated)
    if len(rendered) > char_budget:
        raise BudgetExceededError(
            f"prompt needs {len(rendered)} chars but the budget is {char_budget}"
        )
    return PromptBundle(kind=PromptKind.GENERATION, segments=segments, rendered=rendered)


def render_query_prompt(diag: Diagnostic) -> PromptBundle:
    """Build the query-synthesis prompt: four fixed demonstrations, then the error."""
    if not diag.message.strip():
        raise ValueError("diagnostic message must be nonempty")
    segments: list[tuple[str, str]] = [
        (
            "demonstration",
            f"Error message: {message}\nQuery: {query}",
        )
        for message, query in QUERY_DEMONSTRATIONS
    ]
    segments.append(("error", f"Error message: {diag.message}\nQuery:"))
    header = (
        "Translate the compiler error message into a structural query over the "
        "project database, following the examples."
    )
    rendered = header + "\n\n" + "\n\n".join(text for _, text in segments)
    return PromptBundle(
        kind=PromptKind.QUERY_SYNTHESIS,
        segments=tuple(segments),
        rendered=rendered,
    )
