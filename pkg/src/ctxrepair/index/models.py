"""Data model for the project context database.

The database is a flat, id-ordered list of context entries (one per indexed
module / class / function / variable), six structural relation tables derived
from the entry parent graph, and one embedding per entry.  Everything here is
immutable after construction and JSON-serializable with a stable byte layout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import PurePosixPath
from typing import Iterator, Optional, Sequence

FORMAT_VERSION = 1


class EntryKind(str, Enum):
    MODULE = "Module"
    CLASS = "Class"
    FUNCTION = "Function"
    VARIABLE = "Variable"


def module_name_for_path(path: str) -> str:
    """Map a repository-relative source path to its dotted module name.

    ``sub/b.py`` -> ``sub.b``; ``pkg/__init__.py`` keeps its ``__init__``
    segment (``pkg.__init__``).
    """
    p = PurePosixPath(path.replace("\\", "/"))
    stem = p.with_suffix("")
    return ".".join(stem.parts)


@dataclass(frozen=True)
class SourceUnit:
    """One source file handed to the indexer.

    ``path`` is repository-relative (POSIX separators) and unique within an
    indexing run; ``text`` is the on-disk bytes decoded as UTF-8.
    """

    path: str
    text: str
    language_tag: str = "python"

    @property
    def module_name(self) -> str:
        return module_name_for_path(self.path)


@dataclass(frozen=True)
class Signature:
    """Callable shape captured for function entries.

    ``params`` holds the positionally bindable parameter names in definition
    order; ``n_defaults`` counts how many of them carry defaults.
    """

    params: tuple[str, ...]
    n_defaults: int = 0
    has_vararg: bool = False
    kwonly: tuple[str, ...] = ()
    n_kwonly_defaults: int = 0
    has_kwarg: bool = False

    def to_json(self) -> dict:
        return {
            "params": list(self.params),
            "n_defaults": self.n_defaults,
            "has_vararg": self.has_vararg,
            "kwonly": list(self.kwonly),
            "n_kwonly_defaults": self.n_kwonly_defaults,
            "has_kwarg": self.has_kwarg,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Signature":
        return cls(
            params=tuple(data["params"]),
            n_defaults=data["n_defaults"],
            has_vararg=data["has_vararg"],
            kwonly=tuple(data["kwonly"]),
            n_kwonly_defaults=data["n_kwonly_defaults"],
            has_kwarg=data["has_kwarg"],
        )

    def render(self) -> str:
        parts = list(self.params)
        if self.has_vararg:
            parts.append("*args")
        parts.extend(self.kwonly)
        if self.has_kwarg:
            parts.append("**kwargs")
        return "(" + ", ".join(parts) + ")"


@dataclass(frozen=True)
class ContextEntry:
    """One indexed project symbol.

    ``id`` is the dense position in the database entry list, assigned in
    deterministic traversal order.  ``qualified_name`` is the dot-join of the
    names on the path from the module root down to this entry.
    """

    id: int
    kind: EntryKind
    name: str
    qualified_name: str
    docstring: Optional[str] = None
    signature: Optional[Signature] = None
    span: tuple[int, int] = (1, 1)
    parent_id: Optional[int] = None
    properties: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "name": self.name,
            "qualified_name": self.qualified_name,
            "docstring": self.docstring,
            "signature": self.signature.to_json() if self.signature else None,
            "span": list(self.span),
            "parent_id": self.parent_id,
            "properties": self.properties,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ContextEntry":
        sig = data.get("signature")
        return cls(
            id=data["id"],
            kind=EntryKind(data["kind"]),
            name=data["name"],
            qualified_name=data["qualified_name"],
            docstring=data.get("docstring"),
            signature=Signature.from_json(sig) if sig else None,
            span=tuple(data["span"]),  # type: ignore[arg-type]
            parent_id=data.get("parent_id"),
            properties=dict(data.get("properties", {})),
        )


TABLE_NAMES = ("M", "M_C", "M_C_CF", "M_C_V", "M_GF", "M_GV")


@dataclass(frozen=True)
class StructuralTables:
    """The six precomputed relations used for error-directed retrieval.

    Every tuple references entry ids.  ``M`` holds modules; ``M_C`` pairs a
    module with each class under it; ``M_C_CF`` and ``M_C_V`` add a class's
    member functions and variables; ``M_GF`` / ``M_GV`` pair a module with its
    top-level functions and variables.
    """

    M: tuple[tuple[int, ...], ...] = ()
    M_C: tuple[tuple[int, ...], ...] = ()
    M_C_CF: tuple[tuple[int, ...], ...] = ()
    M_C_V: tuple[tuple[int, ...], ...] = ()
    M_GF: tuple[tuple[int, ...], ...] = ()
    M_GV: tuple[tuple[int, ...], ...] = ()

    def table(self, name: str) -> tuple[tuple[int, ...], ...]:
        if name not in TABLE_NAMES:
            raise KeyError(name)
        return getattr(self, name)

    def all_rows(self) -> Iterator[tuple[str, tuple[int, ...]]]:
        for name in TABLE_NAMES:
            for row in self.table(name):
                yield name, row

    def to_json(self) -> dict:
        return {name: [list(row) for row in self.table(name)] for name in TABLE_NAMES}

    @classmethod
    def from_json(cls, data: dict) -> "StructuralTables":
        return cls(**{name: tuple(tuple(row) for row in data.get(name, [])) for name in TABLE_NAMES})


@dataclass
class EmbedderInfo:
    """Embedder parameters recorded in the database header for reproducibility."""

    kind: str = "local"
    dim: int = 256
    seed: int = 0
    model: Optional[str] = None

    def to_json(self) -> dict:
        return {"kind": self.kind, "dim": self.dim, "seed": self.seed, "model": self.model}

    @classmethod
    def from_json(cls, data: dict) -> "EmbedderInfo":
        return cls(
            kind=data.get("kind", "local"),
            dim=data.get("dim", 256),
            seed=data.get("seed", 0),
            model=data.get("model"),
        )


class ProjectDatabase:
    """Versioned container of entries, derived tables, and embeddings.

    Entry ids are dense ``0..N-1`` in list order; ``embeddings[i]`` belongs to
    ``entries[i]`` and is ``None`` where encoding failed.  Instances are
    immutable once built and safe for concurrent readers.
    """

    def __init__(
        self,
        project_root: str,
        entries: Sequence[ContextEntry],
        tables: StructuralTables,
        embeddings: Sequence[Optional[list[float]]],
        embedder: Optional[EmbedderInfo] = None,
        format_version: int = FORMAT_VERSION,
    ):
        if len(embeddings) != len(entries):
            raise ValueError("embeddings must parallel entries")
        for i, entry in enumerate(entries):
            if entry.id != i:
                raise ValueError(f"entry ids must be dense list positions; got {entry.id} at {i}")
        self.format_version = format_version
        self.project_root = project_root
        self.entries = list(entries)
        self.tables = tables
        self.embeddings = list(embeddings)
        self.embedder = embedder or EmbedderInfo()
        self._children: dict[Optional[int], list[int]] = {}
        for entry in self.entries:
            self._children.setdefault(entry.parent_id, []).append(entry.id)

    def __len__(self) -> int:
        return len(self.entries)

    def entry(self, entry_id: int) -> ContextEntry:
        return self.entries[entry_id]

    def children_of(self, entry_id: Optional[int]) -> list[ContextEntry]:
        return [self.entries[i] for i in self._children.get(entry_id, [])]

    def entries_of_kind(self, kind: EntryKind) -> list[ContextEntry]:
        return [e for e in self.entries if e.kind == kind]

    def module_ancestor(self, entry_id: int) -> Optional[ContextEntry]:
        """Walk parents until the enclosing Module entry (the entry itself if a module)."""
        entry = self.entries[entry_id]
        while entry.kind != EntryKind.MODULE:
            if entry.parent_id is None:
                return None
            entry = self.entries[entry.parent_id]
        return entry

    def module_by_name(self, dotted: str) -> Optional[ContextEntry]:
        for e in self.entries:
            if e.kind == EntryKind.MODULE and e.qualified_name == dotted:
                return e
        return None

    @property
    def missing_embedding_ids(self) -> list[int]:
        return [i for i, v in enumerate(self.embeddings) if v is None]

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "format_version": self.format_version,
            "project_root": self.project_root,
            "entries": [e.to_json() for e in self.entries],
            "tables": self.tables.to_json(),
            "embeddings": self.embeddings,
            "embedder": self.embedder.to_json(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":")) + "\n"

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def from_json_dict(cls, data: dict) -> "ProjectDatabase":
        version = data.get("format_version")
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported database format_version: {version!r}")
        return cls(
            project_root=data["project_root"],
            entries=[ContextEntry.from_json(e) for e in data["entries"]],
            tables=StructuralTables.from_json(data["tables"]),
            embeddings=[list(v) if v is not None else None for v in data["embeddings"]],
            embedder=EmbedderInfo.from_json(data.get("embedder", {})),
        )

    @classmethod
    def loads(cls, text: str) -> "ProjectDatabase":
        return cls.from_json_dict(json.loads(text))

    @classmethod
    def load(cls, path) -> "ProjectDatabase":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.loads(fh.read())
