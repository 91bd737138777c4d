"""Project context indexing: scan, parse, and derive structural tables."""

from .build import build_database, derive_tables, entry_schema_text, extract_file_entries
from .models import (
    ContextEntry,
    EmbedderInfo,
    EntryKind,
    ProjectDatabase,
    Signature,
    SourceUnit,
    StructuralTables,
    module_name_for_path,
)
from .scan import scan_source_files

__all__ = [
    "ContextEntry",
    "EmbedderInfo",
    "EntryKind",
    "ProjectDatabase",
    "Signature",
    "SourceUnit",
    "StructuralTables",
    "build_database",
    "derive_tables",
    "entry_schema_text",
    "extract_file_entries",
    "module_name_for_path",
    "scan_source_files",
]
