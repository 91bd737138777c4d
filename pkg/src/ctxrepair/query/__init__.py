"""Structural search: typed queries over the precomputed symbol relations."""

from .hardcoded import HARDCODED_CODES, hardcoded_query_for
from .lang import (
    Contains,
    FromVar,
    InSource,
    IsInitMethod,
    NameEquals,
    Negation,
    Predicate,
    ScopeEquals,
    SelectItem,
    StructuralQuery,
)
from .parser import parse_query
from .run import DEFAULT_SNIPPET_LINES, QueryResult, execute_query, render_entry
from .synthesize import synthesize_query

__all__ = [
    "Contains",
    "DEFAULT_SNIPPET_LINES",
    "FromVar",
    "HARDCODED_CODES",
    "InSource",
    "IsInitMethod",
    "NameEquals",
    "Negation",
    "Predicate",
    "QueryResult",
    "ScopeEquals",
    "SelectItem",
    "StructuralQuery",
    "execute_query",
    "hardcoded_query_for",
    "parse_query",
    "render_entry",
    "synthesize_query",
]
