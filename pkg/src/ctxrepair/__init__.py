"""Repository-context-aware code repair.

Index a project into a structural + semantic context database, detect
checker errors in generated code, retrieve the project context relevant to
each error, and iteratively re-prompt a pluggable completion backend until
the candidate checks clean.  Includes a pass@k / match-metric evaluation
harness.
"""

__version__ = "0.1.0"

from .diagnostics import (
    CheckReport,
    Diagnostic,
    ErrorCategory,
    builtin_check,
    classify,
    filter_to_solution,
    is_repairable,
    run_external_checker,
)
from .evaluation import (
    EvalReport,
    edit_similarity,
    error_distribution,
    evaluate,
    exact_match,
    identifier_f1,
    pass_at_k,
)
from .gateway import (
    GenerationConfig,
    MockBackend,
    RemoteChatBackend,
    extract_code,
    render_generation_prompt,
    render_query_prompt,
)
from .index import (
    ContextEntry,
    EntryKind,
    ProjectDatabase,
    SourceUnit,
    StructuralTables,
    build_database,
    derive_tables,
    entry_schema_text,
    scan_source_files,
)
from .loop import (
    Candidate,
    CandidateStatus,
    GenerationTask,
    IterationTrace,
    LoopConfig,
    assemble_feedback,
    repair,
    run_task_tests,
)
from .query import (
    QueryResult,
    StructuralQuery,
    execute_query,
    hardcoded_query_for,
    parse_query,
    synthesize_query,
)
from .retrieval import (
    EmbeddingIndex,
    EmbeddingVector,
    LocalEmbedder,
    RemoteEmbedder,
    RetrievalMode,
    RetrievalQuery,
    cosine,
    top_n,
)

__all__ = [
    "Candidate",
    "CandidateStatus",
    "CheckReport",
    "ContextEntry",
    "Diagnostic",
    "EmbeddingIndex",
    "EmbeddingVector",
    "EntryKind",
    "ErrorCategory",
    "EvalReport",
    "GenerationConfig",
    "GenerationTask",
    "IterationTrace",
    "LocalEmbedder",
    "LoopConfig",
    "MockBackend",
    "ProjectDatabase",
    "QueryResult",
    "RemoteChatBackend",
    "RemoteEmbedder",
    "RetrievalMode",
    "RetrievalQuery",
    "SourceUnit",
    "StructuralQuery",
    "StructuralTables",
    "assemble_feedback",
    "build_database",
    "builtin_check",
    "classify",
    "cosine",
    "derive_tables",
    "edit_similarity",
    "entry_schema_text",
    "error_distribution",
    "evaluate",
    "exact_match",
    "execute_query",
    "extract_code",
    "filter_to_solution",
    "hardcoded_query_for",
    "identifier_f1",
    "is_repairable",
    "parse_query",
    "pass_at_k",
    "render_generation_prompt",
    "render_query_prompt",
    "repair",
    "run_external_checker",
    "run_task_tests",
    "scan_source_files",
    "synthesize_query",
    "top_n",
]
