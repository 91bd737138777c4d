"""Checker findings and the error taxonomy.

Categories partition checker errors into: undefined symbols (UNDEF),
incorrect API usage (API), improper object use (OBJECT), runtime/test
failures (FUNC, produced only by test execution), and everything else
(OTHER).  The code-to-subtype table below is fixed; any code outside it
classifies as OTHER.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence


class ErrorCategory(str, Enum):
    UNDEF = "UNDEF"
    API = "API"
    OBJECT = "OBJECT"
    FUNC = "FUNC"
    OTHER = "OTHER"


#: Fixed mapping of frequent checker codes to (category, subtype).
CODE_TAXONOMY: dict[str, tuple[ErrorCategory, str]] = {
    "E0401": (ErrorCategory.UNDEF, "UNDEF-P"),      # unable to import a package
    "E1101": (ErrorCategory.UNDEF, "UNDEF-CM"),     # class accessed for a nonexistent member
    "E0611": (ErrorCategory.UNDEF, "UNDEF-API"),    # name not found in a module
    "E0602": (ErrorCategory.UNDEF, "UNDEF-O"),      # undefined variable or object
    "E1121": (ErrorCategory.API, "API-TMA"),        # too many positional arguments
    "E1120": (ErrorCategory.API, "API-IA"),         # insufficient arguments
    "E1111": (ErrorCategory.API, "API-WA"),         # assignment from a function returning nothing
    "E1123": (ErrorCategory.API, "API-WA"),         # unexpected keyword argument
    "E1133": (ErrorCategory.OBJECT, "OBJ-NI"),      # non-iterable used where iterable expected
    "E1102": (ErrorCategory.OBJECT, "OBJ-NC"),      # calling a non-callable object
    "E1136": (ErrorCategory.OBJECT, "OBJ-NS"),      # subscripting an unsubscriptable value
}

#: Deterministic tie-break order for dominant-category selection.
CATEGORY_ORDER = (
    ErrorCategory.UNDEF,
    ErrorCategory.API,
    ErrorCategory.OBJECT,
    ErrorCategory.OTHER,
    ErrorCategory.FUNC,
)


def classify(code: str) -> tuple[ErrorCategory, Optional[str]]:
    """Total mapping of a checker code to (category, subtype).

    Codes outside the fixed table map to OTHER with no subtype.  The static
    path never yields FUNC; that category belongs to test execution alone.
    """
    if code in CODE_TAXONOMY:
        return CODE_TAXONOMY[code]
    return ErrorCategory.OTHER, None


# Per-code patterns for pulling the load-bearing identifier out of a message.
# Quoted-name conventions vary by code; the generic fallback takes the first
# single-quoted token.
_SYMBOL_PATTERNS: dict[str, re.Pattern] = {
    "E0401": re.compile(r"[Uu]nable to import '([^']+)'"),
    "E0602": re.compile(r"[Uu]ndefined variable '([^']+)'"),
    "E0611": re.compile(r"No name '([^']+)'"),
    "E1101": re.compile(r"(?:Instance of|Class|Module) '([^']+)'"),
    "E0213": re.compile(r"[Mm]ethod '([^']+)'"),
}
_GENERIC_QUOTED = re.compile(r"'([^']+)'")


def extract_symbol(code: str, message: str) -> Optional[str]:
    """Identifier the message is about, or None when nothing matches."""
    pattern = _SYMBOL_PATTERNS.get(code)
    if pattern is not None:
        match = pattern.search(message)
        if match:
            return match.group(1)
    match = _GENERIC_QUOTED.search(message)
    return match.group(1) if match else None


@dataclass(frozen=True)
class Diagnostic:
    """One checker finding, classified into the taxonomy."""

    code: str
    message: str
    file: str
    line: int
    column: int = 0
    symbol: Optional[str] = None
    category: ErrorCategory = ErrorCategory.OTHER
    subtype: Optional[str] = None

    @classmethod
    def from_checker(
        cls,
        code: str,
        message: str,
        file: str,
        line: int,
        column: int = 0,
    ) -> "Diagnostic":
        """Build a classified diagnostic from raw checker output."""
        category, subtype = classify(code)
        return cls(
            code=code,
            message=message,
            file=file,
            line=max(1, line),
            column=column,
            symbol=extract_symbol(code, message),
            category=category,
            subtype=subtype,
        )

    def to_json(self) -> dict:
        return {
            "code": self.code,
            "message": self.message,
            "file": self.file,
            "line": self.line,
            "column": self.column,
            "symbol": self.symbol,
            "category": self.category.value,
            "subtype": self.subtype,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Diagnostic":
        return cls(
            code=data["code"],
            message=data["message"],
            file=data["file"],
            line=data["line"],
            column=data.get("column", 0),
            symbol=data.get("symbol"),
            category=ErrorCategory(data.get("category", "OTHER")),
            subtype=data.get("subtype"),
        )


def func_diagnostic(message: str, file: str, line: int, subtype: Optional[str] = None) -> Diagnostic:
    """A runtime/test-failure finding.  Only the execution path creates these."""
    return Diagnostic(
        code="FUNC",
        message=message,
        file=file,
        line=max(1, line),
        category=ErrorCategory.FUNC,
        subtype=subtype,
    )


def is_repairable(diag: Diagnostic) -> bool:
    """Whether a finding may drive context retrieval.

    All static categories qualify; FUNC findings never enter the repair loop
    (they surface during evaluation only).
    """
    return diag.category != ErrorCategory.FUNC


@dataclass(frozen=True)
class CheckReport:
    """Checker output restricted to the generated region."""

    all_diagnostics: tuple[Diagnostic, ...]
    solution_diagnostics: tuple[Diagnostic, ...]
    dominant_category: Optional[ErrorCategory]
    clean: bool

    def to_json(self) -> dict:
        return {
            "all_diagnostics": [d.to_json() for d in self.all_diagnostics],
            "solution_diagnostics": [d.to_json() for d in self.solution_diagnostics],
            "dominant_category": (
                self.dominant_category.value if self.dominant_category else None
            ),
            "clean": self.clean,
        }


def filter_to_solution(
    diags: Sequence[Diagnostic], solution_span: tuple[int, int]
) -> CheckReport:
    """Keep findings whose line falls inside the candidate's span.

    The dominant category is the most frequent one among kept findings, ties
    broken by the fixed order UNDEF < API < OBJECT < OTHER.
    """
    start, end = solution_span
    kept = tuple(d for d in diags if start <= d.line <= end)
    dominant: Optional[ErrorCategory] = None
    if kept:
        counts: dict[ErrorCategory, int] = {}
        for d in kept:
            counts[d.category] = counts.get(d.category, 0) + 1
        dominant = min(
            counts, key=lambda cat: (-counts[cat], CATEGORY_ORDER.index(cat))
        )
    return CheckReport(
        all_diagnostics=tuple(diags),
        solution_diagnostics=kept,
        dominant_category=dominant,
        clean=not kept,
    )


def order_dominant_first(report: CheckReport) -> list[Diagnostic]:
    """Solution findings with the dominant category's entries first."""
    if report.dominant_category is None:
        return list(report.solution_diagnostics)
    first = [d for d in report.solution_diagnostics if d.category == report.dominant_category]
    rest = [d for d in report.solution_diagnostics if d.category != report.dominant_category]
    return first + rest


__all__ = [
    "CATEGORY_ORDER",
    "CODE_TAXONOMY",
    "CheckReport",
    "Diagnostic",
    "ErrorCategory",
    "classify",
    "extract_symbol",
    "filter_to_solution",
    "func_diagnostic",
    "is_repairable",
    "order_dominant_first",
]
