"""Evaluation metrics and reporting over repair-run outputs.

Pass@k uses the unbiased estimator 1 - C(n-c, k)/C(n, k) with exact integer
binomials.  Match metrics follow the completion-benchmark conventions:
character exact match, Levenshtein-based edit similarity, and identifier
set exact-match / F1.
"""

from __future__ import annotations

import io
import json
import keyword
import re
import tokenize
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .diagnostics.models import ErrorCategory
from .loop.models import IterationTrace, read_traces_jsonl


def pass_at_k(n: int, c: int, k: int) -> float:
    """Unbiased probability that at least one of k samples is correct.

    Exact binomial arithmetic; no overflow for any practical n (ints are
    arbitrary precision, the Fraction keeps the quotient exact until the
    final float conversion).
    """
    if not 0 <= c <= n:
        raise ValueError(f"need 0 <= c <= n, got c={c}, n={n}")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if c == 0:
        return 0.0
    if n - c < k:
        return 1.0
    return float(1 - Fraction(comb(n - c, k), comb(n, k)))


def levenshtein(a: str, b: str) -> int:
    """Minimum number of single-character edits transforming a into b."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[len(b)]


def edit_similarity(a: str, b: str) -> float:
    """1 - lev(a, b) / max(|a|, |b|); two empty strings are fully similar."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def _normalize_trailing(text: str) -> str:
    return "\n".join(line.rstrip() for line in text.splitlines())


def exact_match(a: str, b: str) -> int:
    """All-or-nothing character match, after per-line trailing-whitespace strip."""
    return 1 if _normalize_trailing(a) == _normalize_trailing(b) else 0


_IDENTIFIER_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def extract_identifiers(code: str) -> set[str]:
    """Identifier set of a code string.

    Primary path: tokenizer NAME tokens minus keywords; falls back to a
    plain identifier regex when the code does not tokenize.
    """
    try:
        names = {
            tok.string
            for tok in tokenize.generate_tokens(io.StringIO(code).readline)
            if tok.type == tokenize.NAME and not keyword.iskeyword(tok.string)
        }
        return names
    except (tokenize.TokenError, IndentationError, SyntaxError):
        return {
            name for name in _IDENTIFIER_RE.findall(code) if not keyword.iskeyword(name)
        }


def identifier_f1(pred: str, gold: str) -> tuple[float, float, float]:
    """(precision, recall, F1) over the shared identifier sets."""
    pred_ids = extract_identifiers(pred)
    gold_ids = extract_identifiers(gold)
    if not pred_ids and not gold_ids:
        return 1.0, 1.0, 1.0
    if not pred_ids or not gold_ids:
        return 0.0, 0.0, 0.0
    shared = len(pred_ids & gold_ids)
    precision = shared / len(pred_ids)
    recall = shared / len(gold_ids)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def identifier_exact_match(pred: str, gold: str) -> int:
    return 1 if extract_identifiers(pred) == extract_identifiers(gold) else 0


def error_distribution(
    traces: Iterable[IterationTrace],
) -> dict[tuple[str, int], int]:
    """Counts of solution findings by (category, iteration index).

    FUNC findings are counted here like any other category; repair-side
    statistics exclude them separately.
    """
    counts: dict[tuple[str, int], int] = {}
    for trace in traces:
        for diag in trace.diagnostics_after:
            key = (diag.category.value, trace.iteration)
            counts[key] = counts.get(key, 0) + 1
    return counts


@dataclass
class TaskResult:
    """Per-task candidate counts: n generated, c passing."""

    task_id: str
    n: int
    c: int

    def __post_init__(self) -> None:
        if not 0 <= self.c <= self.n:
            raise ValueError(f"need 0 <= c <= n, got c={self.c}, n={self.n}")


@dataclass
class EvalReport:
    """Aggregated metrics for one results directory."""

    pass_at_k: dict[int, float] = field(default_factory=dict)
    error_distribution: dict[tuple[str, int], int] = field(default_factory=dict)
    match_metrics: Optional[dict[str, float]] = None
    n_tasks: int = 0

    def to_json(self) -> dict:
        return {
            "n_tasks": self.n_tasks,
            "pass_at_k": {str(k): v for k, v in sorted(self.pass_at_k.items())},
            "error_distribution": [
                {"category": cat, "iteration": it, "count": count}
                for (cat, it), count in sorted(self.error_distribution.items())
            ],
            "match_metrics": self.match_metrics,
        }

    def to_text_table(self) -> str:
        lines = [f"tasks evaluated: {self.n_tasks}", ""]
        lines.append("pass@k")
        for k, value in sorted(self.pass_at_k.items()):
            lines.append(f"  pass@{k:<4d} {value:.5f}")
        if self.error_distribution:
            lines.append("")
            lines.append("errors by category and iteration")
            lines.append(f"  {'category':<8} {'iteration':>9} {'count':>6}")
            for (cat, it), count in sorted(self.error_distribution.items()):
                lines.append(f"  {cat:<8} {it:>9d} {count:>6d}")
        if self.match_metrics:
            lines.append("")
            lines.append("match metrics")
            for name, value in self.match_metrics.items():
                lines.append(f"  {name:<5} {value:.5f}")
        return "\n".join(lines) + "\n"

    def distribution_csv(self) -> str:
        rows = ["category,iteration,count"]
        for (cat, it), count in sorted(self.error_distribution.items()):
            rows.append(f"{cat},{it},{count}")
        return "\n".join(rows) + "\n"


def load_results_dir(results_dir: str | Path) -> tuple[list[TaskResult], list[IterationTrace]]:
    """Read ``results.json`` plus every ``*.traces.jsonl`` in a run directory."""
    root = Path(results_dir)
    results_path = root / "results.json"
    if not results_path.is_file():
        raise FileNotFoundError(f"no results.json under {root}")
    with open(results_path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    results = [TaskResult(task_id=str(r["task_id"]), n=int(r["n"]), c=int(r["c"])) for r in raw]
    traces: list[IterationTrace] = []
    for path in sorted(root.glob("*.traces.jsonl")):
        traces.extend(read_traces_jsonl(path))
    return results, traces


def _match_metrics(results: Sequence[TaskResult], results_dir: Path, refs_dir: Path) -> dict[str, float]:
    ems, ess, iems, if1s = [], [], [], []
    for result in results:
        pred_path = results_dir / f"{result.task_id}.final.py"
        gold_path = refs_dir / f"{result.task_id}.py"
        if not pred_path.is_file() or not gold_path.is_file():
            continue
        pred = pred_path.read_text(encoding="utf-8")
        gold = gold_path.read_text(encoding="utf-8")
        ems.append(exact_match(pred, gold))
        ess.append(edit_similarity(pred, gold))
        iems.append(identifier_exact_match(pred, gold))
        if1s.append(identifier_f1(pred, gold)[2])
    if not ems:
        return {}

    def mean(xs):
        return sum(xs) / len(xs)

    return {
        "C-EM": mean(ems),
        "C-ES": mean(ess),
        "I-EM": mean(iems),
        "I-F1": mean(if1s),
    }


def evaluate(
    results_dir: str | Path,
    ks: Sequence[int] = (1, 5, 10),
    refs_dir: Optional[str | Path] = None,
) -> EvalReport:
    """Full evaluation of a repair-run output directory.

    Pass@k is averaged over tasks (k capped at each task's n); match metrics
    are computed when a reference directory of gold files is given.
    """
    results, traces = load_results_dir(results_dir)
    report = EvalReport(n_tasks=len(results))
    for k in ks:
        values = [pass_at_k(r.n, r.c, min(k, r.n)) for r in results if r.n >= 1]
        report.pass_at_k[k] = sum(values) / len(values) if values else 0.0
    report.error_distribution = error_distribution(traces)
    if refs_dir is not None:
        metrics = _match_metrics(results, Path(results_dir), Path(refs_dir))
        report.match_metrics = metrics or None
    return report


#: Categories excluded from repair-side statistics (evaluation-only findings).
NON_REPAIRABLE_CATEGORIES = (ErrorCategory.FUNC,)
