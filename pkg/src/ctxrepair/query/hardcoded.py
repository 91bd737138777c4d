"""Hard-coded structural retrieval for the most frequent checker codes.

Five codes bypass query synthesis entirely and read the precomputed tables:
syntax errors (E0001), undefined variables (E0602), missing members (E1101),
no-self-argument (E0213), and redefinition (E0102).  Everything else returns
None so the caller falls through to LLM query synthesis.
"""

from __future__ import annotations

from typing import Optional

from ..diagnostics.models import Diagnostic
from ..index.models import EntryKind, ProjectDatabase, module_name_for_path
from .run import QueryResult, singleton_result

HARDCODED_CODES = ("E0001", "E0602", "E1101", "E0213", "E0102")


def _module_of_diag(db: ProjectDatabase, diag: Diagnostic) -> Optional[int]:
    dotted = module_name_for_path(diag.file)
    module = db.module_by_name(dotted)
    return module.id if module else None


def _entries_in_module_at_line(db: ProjectDatabase, diag: Diagnostic) -> list[int]:
    """Ids of entries in the diagnostic's module whose span covers its line."""
    module_id = _module_of_diag(db, diag)
    if module_id is None:
        return []
    covering = []
    for entry in db.entries:
        anc = db.module_ancestor(entry.id)
        if anc is None or anc.id != module_id:
            continue
        if entry.span[0] <= diag.line <= entry.span[1]:
            covering.append(entry)
    return [e.id for e in covering]


def _innermost(db: ProjectDatabase, ids: list[int]) -> Optional[int]:
    if not ids:
        return None
    return min(ids, key=lambda i: (db.entry(i).span[1] - db.entry(i).span[0], -i))


def hardcoded_query_for(diag: Diagnostic, db: ProjectDatabase) -> Optional[QueryResult]:
    """Table-driven context for the five frequent codes; None otherwise.

    Never touches the completion backend.  A None return signals fallback to
    query synthesis; an empty QueryResult means the lookup ran and found
    nothing.
    """
    code = diag.code
    if code not in HARDCODED_CODES:
        return None

    if code == "E0602":
        if not diag.symbol:
            return None
        table_ids = {i for _, row in db.tables.all_rows() for i in row}
        matched = [i for i in table_ids if db.entry(i).name == diag.symbol]
        return singleton_result(db, matched)

    if code == "E1101":
        if not diag.symbol:
            return None
        class_ids = {
            e.id for e in db.entries_of_kind(EntryKind.CLASS) if e.name == diag.symbol
        }
        members = [
            row[2]
            for name in ("M_C_CF", "M_C_V")
            for row in db.tables.table(name)
            if row[1] in class_ids
        ]
        return singleton_result(db, members)

    if code == "E0102":
        qualified: Optional[str] = None
        if diag.symbol:
            candidates = [e for e in db.entries if e.name == diag.symbol]
            if len({e.qualified_name for e in candidates}) == 1 and candidates:
                qualified = candidates[0].qualified_name
        if qualified is None:
            inner = _innermost(db, _entries_in_module_at_line(db, diag))
            if inner is None:
                return singleton_result(db, [])
            qualified = db.entry(inner).qualified_name
        matched = [e.id for e in db.entries if e.qualified_name == qualified]
        return singleton_result(db, matched)

    # E0213 / E0001: the enclosing entry's definition context.
    inner = _innermost(db, _entries_in_module_at_line(db, diag))
    if inner is None and diag.symbol:
        named = [e.id for e in db.entries if e.name == diag.symbol]
        return singleton_result(db, named)
    return singleton_result(db, [inner] if inner is not None else [])
