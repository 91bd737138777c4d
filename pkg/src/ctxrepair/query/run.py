"""Structural query execution and result rendering.

Execution is a nested-loop join over the database: each FROM variable ranges
over the entries of its kind, bindings must satisfy every predicate, and the
SELECT clause projects entry-id tuples.  Unsatisfiable queries return empty
results, never errors.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..index.models import ContextEntry, EntryKind, ProjectDatabase
from .lang import (
    Contains,
    InSource,
    IsInitMethod,
    NameEquals,
    Negation,
    Predicate,
    StructuralQuery,
)

DEFAULT_SNIPPET_LINES = 40


@dataclass(frozen=True)
class QueryResult:
    """Deduplicated, id-ordered match tuples plus their rendered snippets."""

    tuples: tuple[tuple[int, ...], ...]
    rendered: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.tuples)


def _holds(pred: Predicate, binding: dict[str, ContextEntry], db: ProjectDatabase) -> bool:
    if isinstance(pred, Negation):
        return not _holds(pred.inner, binding, db)
    if isinstance(pred, Contains):
        container = binding[pred.container]
        member = binding[pred.member]
        if container.kind == EntryKind.MODULE and member.kind == EntryKind.FUNCTION:
            # Module-scoped function search is transitive (methods included).
            ancestor = db.module_ancestor(member.id)
            return ancestor is not None and ancestor.id == container.id
        return member.parent_id == container.id
    if isinstance(pred, NameEquals):
        entry = binding[pred.var]
        if "." in pred.literal:
            return entry.qualified_name == pred.literal
        return entry.name == pred.literal
    if isinstance(pred, InSource):
        return True  # every indexed entry comes from project source
    if isinstance(pred, IsInitMethod):
        entry = binding[pred.var]
        return entry.kind == EntryKind.FUNCTION and entry.name == "__init__"
    # ScopeEquals
    return binding[pred.var].parent_id == binding[pred.scope].id


def _source_excerpt(db: ProjectDatabase, entry: ContextEntry, line_budget: int) -> Optional[str]:
    module = db.module_ancestor(entry.id)
    if module is None:
        return None
    rel = module.properties.get("path")
    if not rel:
        return None
    path = Path(db.project_root) / rel
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError):
        return None
    start, end = entry.span
    excerpt = lines[start - 1 : end]
    if len(excerpt) > line_budget:
        excerpt = excerpt[:line_budget] + ["# ... truncated ..."]
    return "\n".join(excerpt)


def render_entry(
    db: ProjectDatabase,
    entry: ContextEntry,
    include_source: bool = False,
    line_budget: int = DEFAULT_SNIPPET_LINES,
) -> str:
    """Context snippet for one entry: header, docstring, optional source lines."""
    header = f"{entry.kind.value} {entry.qualified_name}"
    if entry.signature is not None:
        header += entry.signature.render()
    lines = [header]
    if entry.docstring:
        lines.append(f'"""{entry.docstring}"""')
    if include_source:
        excerpt = _source_excerpt(db, entry, line_budget)
        if excerpt is not None:
            lines.append(excerpt)
    return "\n".join(lines)


def execute_query(
    q: StructuralQuery,
    db: ProjectDatabase,
    line_budget: int = DEFAULT_SNIPPET_LINES,
) -> QueryResult:
    """Evaluate a query against the database.

    Tuples are deduplicated and ordered ascending by their id components.
    """
    domains = [(fv.name, db.entries_of_kind(fv.kind)) for fv in q.from_clause]

    matches: set[tuple[int, ...]] = set()
    binding: dict[str, ContextEntry] = {}

    def bind(position: int) -> None:
        if position == len(domains):
            if all(_holds(p, binding, db) for p in q.where_clause):
                matches.add(tuple(binding[item.var].id for item in q.select_clause))
            return
        var, entries = domains[position]
        for entry in entries:
            binding[var] = entry
            bind(position + 1)
        binding.pop(var, None)

    bind(0)

    ordered = tuple(sorted(matches))
    rendered = tuple(
        "\n\n".join(
            render_entry(db, db.entry(entry_id), include_source=item.definition, line_budget=line_budget)
            for entry_id, item in zip(row, q.select_clause)
        )
        for row in ordered
    )
    return QueryResult(tuples=ordered, rendered=rendered)


def singleton_result(
    db: ProjectDatabase,
    entry_ids: list[int],
    include_source: bool = True,
    line_budget: int = DEFAULT_SNIPPET_LINES,
) -> QueryResult:
    """A result of 1-tuples over the given entries (used by hard-coded lookups)."""
    ordered = tuple((i,) for i in sorted(set(entry_ids)))
    rendered = tuple(
        render_entry(db, db.entry(row[0]), include_source=include_source, line_budget=line_budget)
        for row in ordered
    )
    return QueryResult(tuples=ordered, rendered=rendered)
