"""Project database construction.

Each source file is turned into a syntax tree and walked with an explicit
visit stack.  Visiting a module root, class, function, or variable node emits
one context entry whose schema text (kind + qualified name + signature +
docstring) is encoded for semantic retrieval.  A prefix sentinel pushed after
each scope-opening node keeps the qualified-name stack in sync as subtrees
are exhausted, so output order is deterministic for any input order.
"""

from __future__ import annotations

import ast
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ..errors import CtxRepairError
from .models import (
    ContextEntry,
    EmbedderInfo,
    EntryKind,
    ProjectDatabase,
    Signature,
    SourceUnit,
    StructuralTables,
)

logger = logging.getLogger(__name__)

Encoder = Callable[[str], Sequence[float]]

_PREFIX_MARK = object()

_VALUE_REPR_LIMIT = 120


@dataclass
class _RawEntry:
    """File-local entry before global id assignment."""

    kind: EntryKind
    name: str
    qualified_name: str
    span: tuple[int, int]
    parent_index: Optional[int]
    docstring: Optional[str] = None
    signature: Optional[Signature] = None
    properties: dict[str, str] = field(default_factory=dict)


def _signature_of(node: ast.FunctionDef | ast.AsyncFunctionDef) -> Signature:
    args = node.args
    params = tuple(a.arg for a in args.posonlyargs + args.args)
    return Signature(
        params=params,
        n_defaults=len(args.defaults),
        has_vararg=args.vararg is not None,
        kwonly=tuple(a.arg for a in args.kwonlyargs),
        n_kwonly_defaults=sum(1 for d in args.kw_defaults if d is not None),
        has_kwarg=args.kwarg is not None,
    )


def _decorator_names(node: ast.ClassDef | ast.FunctionDef | ast.AsyncFunctionDef) -> str:
    names = []
    for dec in node.decorator_list:
        try:
            names.append(ast.unparse(dec))
        except Exception:  # pragma: no cover - unparse is total on valid trees
            names.append("<decorator>")
    return ", ".join(names)


def _bound_names(target: ast.expr) -> list[str]:
    """Simple names bound by an assignment target, in source order."""
    if isinstance(target, ast.Name):
        return [target.id]
    if isinstance(target, (ast.Tuple, ast.List)):
        names: list[str] = []
        for elt in target.elts:
            names.extend(_bound_names(elt))
        return names
    return []  # attribute / subscript targets do not declare project symbols


def _stmt_children(node: ast.AST) -> list[ast.AST]:
    """Child statements (and statement-bearing wrappers) in source order."""
    kinds: tuple = (ast.stmt, ast.excepthandler)
    if hasattr(ast, "match_case"):
        kinds = (ast.stmt, ast.excepthandler, ast.match_case)
    return [c for c in ast.iter_child_nodes(node) if isinstance(c, kinds)]


def extract_file_entries(unit: SourceUnit) -> list[_RawEntry]:
    """Walk one parsed file and emit its entries in deterministic order.

    Pure function of the source unit; raises ``SyntaxError`` when the file
    does not parse (callers decide the skip policy).
    """
    tree = ast.parse(unit.text)
    entries: list[_RawEntry] = []
    prefix: list[int] = []  # indices into `entries` for open scopes
    prefix_names: list[str] = []

    stack: list = [tree]
    while stack:
        node = stack.pop()
        if node is _PREFIX_MARK:
            prefix.pop()
            prefix_names.pop()
            continue

        opened_scope = False
        if isinstance(node, ast.Module):
            name = unit.module_name
            entries.append(
                _RawEntry(
                    kind=EntryKind.MODULE,
                    name=name,
                    qualified_name=name,
                    span=(1, max(1, len(unit.text.splitlines()))),
                    parent_index=None,
                    docstring=ast.get_docstring(node),
                    properties={"path": unit.path},
                )
            )
            opened_scope = True
        elif isinstance(node, ast.ClassDef):
            props = {}
            if node.decorator_list:
                props["decorators"] = _decorator_names(node)
            if node.bases:
                props["bases"] = ", ".join(ast.unparse(b) for b in node.bases)
            entries.append(
                _RawEntry(
                    kind=EntryKind.CLASS,
                    name=node.name,
                    qualified_name=".".join(prefix_names + [node.name]),
                    span=(node.lineno, node.end_lineno or node.lineno),
                    parent_index=prefix[-1],
                    docstring=ast.get_docstring(node),
                    properties=props,
                )
            )
            opened_scope = True
        elif isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            entries.append(
                _RawEntry(
                    kind=EntryKind.FUNCTION,
                    name=node.name,
                    qualified_name=".".join(prefix_names + [node.name]),
                    span=(node.lineno, node.end_lineno or node.lineno),
                    parent_index=prefix[-1],
                    docstring=ast.get_docstring(node),
                    signature=_signature_of(node),
                    properties=(
                        {"decorators": _decorator_names(node)} if node.decorator_list else {}
                    ),
                )
            )
            opened_scope = True
        elif isinstance(node, (ast.Assign, ast.AnnAssign)):
            targets = node.targets if isinstance(node, ast.Assign) else [node.target]
            props: dict[str, str] = {}
            if node.value is not None:
                value_text = ast.unparse(node.value)
                props["value"] = value_text[:_VALUE_REPR_LIMIT]
            span = (node.lineno, node.end_lineno or node.lineno)
            for target in targets:
                for bound in _bound_names(target):
                    entries.append(
                        _RawEntry(
                            kind=EntryKind.VARIABLE,
                            name=bound,
                            qualified_name=".".join(prefix_names + [bound]),
                            span=span,
                            parent_index=prefix[-1],
                            properties=dict(props),
                        )
                    )
            continue  # assignment values cannot contain further entries

        if opened_scope:
            index = len(entries) - 1
            prefix.append(index)
            prefix_names.append(entries[index].name)
            stack.append(_PREFIX_MARK)

        for child in reversed(_stmt_children(node)):
            stack.append(child)

    return entries


def entry_schema_text(entry: ContextEntry) -> str:
    """The deterministic passage encoded for an entry.

    Concatenates kind, qualified name, signature (functions), and docstring;
    the docstring segment is omitted entirely when absent.
    """
    head = f"{entry.kind.value} {entry.qualified_name}"
    if entry.signature is not None:
        head += entry.signature.render()
    if entry.docstring:
        return f"{head}: {entry.docstring}"
    return head


def derive_tables(entries: Sequence[ContextEntry]) -> StructuralTables:
    """Brute-force join of the six relations over the entry parent graph."""
    by_id = {e.id: e for e in entries}

    def module_ancestor(e: ContextEntry) -> Optional[ContextEntry]:
        cur = e
        while cur.kind != EntryKind.MODULE:
            if cur.parent_id is None or cur.parent_id not in by_id:
                return None
            cur = by_id[cur.parent_id]
        return cur

    m_rows, mc, mccf, mcv, mgf, mgv = [], [], [], [], [], []
    for e in entries:
        if e.kind == EntryKind.MODULE:
            m_rows.append((e.id,))
            continue
        parent = by_id.get(e.parent_id) if e.parent_id is not None else None
        mod = module_ancestor(e)
        if mod is None:
            continue
        if e.kind == EntryKind.CLASS:
            mc.append((mod.id, e.id))
        elif e.kind == EntryKind.FUNCTION:
            if parent is not None and parent.kind == EntryKind.CLASS:
                mccf.append((mod.id, parent.id, e.id))
            elif parent is not None and parent.kind == EntryKind.MODULE:
                mgf.append((mod.id, e.id))
        elif e.kind == EntryKind.VARIABLE:
            if parent is not None and parent.kind == EntryKind.CLASS:
                mcv.append((mod.id, parent.id, e.id))
            elif parent is not None and parent.kind == EntryKind.MODULE:
                mgv.append((mod.id, e.id))

    return StructuralTables(
        M=tuple(sorted(m_rows)),
        M_C=tuple(sorted(mc)),
        M_C_CF=tuple(sorted(mccf)),
        M_C_V=tuple(sorted(mcv)),
        M_GF=tuple(sorted(mgf)),
        M_GV=tuple(sorted(mgv)),
    )


def _encode_entry(encoder: Encoder, text: str) -> Optional[list[float]]:
    try:
        raw = encoder(text)
        vec = np.asarray(raw, dtype=np.float32)
    except Exception as exc:
        logger.warning("encoder failed for entry passage %r: %s", text[:60], exc)
        return None
    if vec.ndim != 1 or vec.size == 0 or not np.all(np.isfinite(vec)):
        logger.warning("encoder returned a non-finite or malformed vector; entry flagged")
        return None
    return [float(v) for v in vec]


def build_database(
    sources: Sequence[SourceUnit],
    encoder: Encoder,
    project_root: str = ".",
    embedder_info: Optional[EmbedderInfo] = None,
) -> ProjectDatabase:
    """Build the full context database from source units.

    Files are processed in lexicographic path order regardless of input
    order; parse failures skip the file with a warning.  Entries that fail
    to encode are stored with a ``None`` embedding.
    """
    ordered = sorted(sources, key=lambda u: u.path)
    seen_paths = set()
    for unit in ordered:
        if unit.path in seen_paths:
            raise CtxRepairError(f"duplicate source path in one indexing run: {unit.path}")
        seen_paths.add(unit.path)

    entries: list[ContextEntry] = []
    for unit in ordered:
        try:
            raw_entries = extract_file_entries(unit)
        except SyntaxError as exc:
            logger.warning("skipping unparsable file %s: %s", unit.path, exc)
            continue
        offset = len(entries)
        for local_index, raw in enumerate(raw_entries):
            entries.append(
                ContextEntry(
                    id=offset + local_index,
                    kind=raw.kind,
                    name=raw.name,
                    qualified_name=raw.qualified_name,
                    docstring=raw.docstring,
                    signature=raw.signature,
                    span=raw.span,
                    parent_id=(
                        offset + raw.parent_index if raw.parent_index is not None else None
                    ),
                    properties=raw.properties,
                )
            )

    embeddings = [_encode_entry(encoder, entry_schema_text(e)) for e in entries]
    tables = derive_tables(entries)
    return ProjectDatabase(
        project_root=project_root,
        entries=entries,
        tables=tables,
        embeddings=embeddings,
        embedder=embedder_info,
    )
