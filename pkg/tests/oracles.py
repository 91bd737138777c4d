"""Independent brute-force oracles.

Everything here re-derives expected values from first principles so the
production implementations are checked against a second, structurally
different computation: plain nested-loop joins, itertools-product binding
enumeration, full-matrix edit distance, product-form and resampled pass@k.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from ctxrepair.index.models import ContextEntry, EntryKind, ProjectDatabase
from ctxrepair.query.lang import (
    Contains,
    InSource,
    IsInitMethod,
    NameEquals,
    Negation,
    ScopeEquals,
    StructuralQuery,
)


# ---------------------------------------------------------------------------
# structural tables
# ---------------------------------------------------------------------------


def _is_module_ancestor(by_id: dict, module: ContextEntry, entry: ContextEntry) -> bool:
    current = entry
    while current.parent_id is not None:
        current = by_id[current.parent_id]
        if current.id == module.id:
            return True
    return False


def brute_force_tables(entries) -> dict[str, list[tuple[int, ...]]]:
    """Nested-loop joins over the parent graph, one comprehension per table."""
    by_id = {e.id: e for e in entries}
    modules = [e for e in entries if e.kind == EntryKind.MODULE]
    classes = [e for e in entries if e.kind == EntryKind.CLASS]
    functions = [e for e in entries if e.kind == EntryKind.FUNCTION]
    variables = [e for e in entries if e.kind == EntryKind.VARIABLE]

    return {
        "M": sorted((m.id,) for m in modules),
        "M_C": sorted(
            (m.id, c.id)
            for m in modules
            for c in classes
            if _is_module_ancestor(by_id, m, c)
        ),
        "M_C_CF": sorted(
            (m.id, c.id, f.id)
            for m in modules
            for c in classes
            for f in functions
            if f.parent_id == c.id and _is_module_ancestor(by_id, m, c)
        ),
        "M_C_V": sorted(
            (m.id, c.id, v.id)
            for m in modules
            for c in classes
            for v in variables
            if v.parent_id == c.id and _is_module_ancestor(by_id, m, c)
        ),
        "M_GF": sorted(
            (m.id, f.id) for m in modules for f in functions if f.parent_id == m.id
        ),
        "M_GV": sorted(
            (m.id, v.id) for m in modules for v in variables if v.parent_id == m.id
        ),
    }


# ---------------------------------------------------------------------------
# query interpretation
# ---------------------------------------------------------------------------


def _oracle_holds(pred, binding: dict[str, ContextEntry], by_id: dict) -> bool:
    if isinstance(pred, Negation):
        return not _oracle_holds(pred.inner, binding, by_id)
    if isinstance(pred, Contains):
        container = binding[pred.container]
        member = binding[pred.member]
        if container.kind == EntryKind.MODULE and member.kind == EntryKind.FUNCTION:
            current = member
            while current.parent_id is not None:
                current = by_id[current.parent_id]
            return current.id == container.id and member.id != container.id
        return member.parent_id == container.id
    if isinstance(pred, NameEquals):
        entry = binding[pred.var]
        return (
            entry.qualified_name == pred.literal
            if "." in pred.literal
            else entry.name == pred.literal
        )
    if isinstance(pred, ScopeEquals):
        return binding[pred.var].parent_id == binding[pred.scope].id
    if isinstance(pred, InSource):
        return True
    if isinstance(pred, IsInitMethod):
        entry = binding[pred.var]
        return entry.kind == EntryKind.FUNCTION and entry.name == "__init__"
    raise TypeError(f"unknown predicate: {pred!r}")


def brute_force_execute(q: StructuralQuery, db: ProjectDatabase) -> list[tuple[int, ...]]:
    """Enumerate every variable binding with itertools.product."""
    by_id = {e.id: e for e in db.entries}
    domains = [
        [e for e in db.entries if e.kind == fv.kind] for fv in q.from_clause
    ]
    names = [fv.name for fv in q.from_clause]
    out: set[tuple[int, ...]] = set()
    for combo in itertools.product(*domains):
        binding = dict(zip(names, combo))
        if all(_oracle_holds(p, binding, by_id) for p in q.where_clause):
            out.add(tuple(binding[item.var].id for item in q.select_clause))
    return sorted(out)


# ---------------------------------------------------------------------------
# retrieval
# ---------------------------------------------------------------------------


def brute_force_top_n(query_vec, rows, n: int) -> list[tuple[int, float]]:
    """Full scan with numpy-free cosine, sorted by (-score, id)."""
    scored = []
    for entry_id, vec, _ in rows:
        q = [float(x) for x in query_vec]
        v = [float(x) for x in vec]
        dot = sum(a * b for a, b in zip(q, v))
        nq = sum(a * a for a in q) ** 0.5
        nv = sum(b * b for b in v) ** 0.5
        score = 0.0 if nq == 0 or nv == 0 else dot / (nq * nv)
        scored.append((entry_id, score))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:n]


def bag_of_tokens_cosine(a: str, b: str) -> float:
    """Token-count cosine with no hashing (collision-free reference)."""
    import re
    from collections import Counter

    tok = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|\d+")
    ca, cb = Counter(tok.findall(a.lower())), Counter(tok.findall(b.lower()))
    dot = sum(ca[t] * cb[t] for t in ca)
    na = sum(v * v for v in ca.values()) ** 0.5
    nb = sum(v * v for v in cb.values()) ** 0.5
    return 0.0 if na == 0 or nb == 0 else dot / (na * nb)


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------


def pass_at_k_product(n: int, c: int, k: int) -> float:
    """Numerically stable product form of the unbiased estimator."""
    if c == 0:
        return 0.0
    if n - c < k:
        return 1.0
    value = 1.0
    for i in range(k):
        value *= (n - c - i) / (n - i)
    return 1.0 - value


def pass_at_k_montecarlo(n: int, c: int, k: int, draws: int, seed: int) -> float:
    """Resampling estimate: uniform k-subsets without replacement.

    The number of correct samples in a uniform k-subset is hypergeometric,
    so draws are vectorized through numpy's generator.
    """
    rng = np.random.default_rng(seed)
    hits = rng.hypergeometric(ngood=c, nbad=n - c, nsample=k, size=draws)
    return float(np.mean(hits >= 1))


def pass_at_k_montecarlo_plain(n: int, c: int, k: int, draws: int, seed: int) -> float:
    """Slow literal resampler (random.sample), for spot checks."""
    rng = random.Random(seed)
    correct = set(range(c))
    hits = 0
    for _ in range(draws):
        if any(i in correct for i in rng.sample(range(n), k)):
            hits += 1
    return hits / draws


def dp_levenshtein(a: str, b: str) -> int:
    """Full-matrix dynamic program (the production code keeps two rows)."""
    rows, cols = len(a) + 1, len(b) + 1
    matrix = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        matrix[i][0] = i
    for j in range(cols):
        matrix[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            matrix[i][j] = min(
                matrix[i - 1][j] + 1,
                matrix[i][j - 1] + 1,
                matrix[i - 1][j - 1] + cost,
            )
    return matrix[rows - 1][cols - 1]


# ---------------------------------------------------------------------------
# randomized fixture databases
# ---------------------------------------------------------------------------

MODULE_NAME_POOL = (
    "async._bolt3",
    "neo4j._sync.io._bolt5",
    "neo4j.time.__init__",
    "app",
    "sub.util",
)
CLASS_NAME_POOL = ("RootLogger", "AsyncBolt3", "Clock", "Helper", "Worker")
FUNCTION_NAME_POOL = ("dumpXML", "local_offset", "run", "__init__", "assist")
VARIABLE_NAME_POOL = ("is_reset", "DEFAULT_PORT", "payload", "cache")


def random_database(seed: int) -> ProjectDatabase:
    """A small random entry graph drawn from name pools that overlap the
    demonstration queries' literals, so executions are often nonempty."""
    rng = random.Random(seed)
    entries: list[ContextEntry] = []

    def add(kind, name, parent_id):
        qualified = (
            name
            if parent_id is None
            else f"{entries[parent_id].qualified_name}.{name}"
        )
        entry = ContextEntry(
            id=len(entries),
            kind=kind,
            name=name,
            qualified_name=qualified,
            span=(1, 1),
            parent_id=parent_id,
        )
        entries.append(entry)
        return entry.id

    for module_name in rng.sample(MODULE_NAME_POOL, rng.randint(1, 3)):
        module_id = add(EntryKind.MODULE, module_name, None)
        for _ in range(rng.randint(0, 2)):
            class_id = add(EntryKind.CLASS, rng.choice(CLASS_NAME_POOL), module_id)
            for _ in range(rng.randint(0, 3)):
                add(EntryKind.FUNCTION, rng.choice(FUNCTION_NAME_POOL), class_id)
            for _ in range(rng.randint(0, 2)):
                add(EntryKind.VARIABLE, rng.choice(VARIABLE_NAME_POOL), class_id)
            if rng.random() < 0.3:
                nested = add(EntryKind.CLASS, rng.choice(CLASS_NAME_POOL), class_id)
                if rng.random() < 0.5:
                    add(EntryKind.FUNCTION, rng.choice(FUNCTION_NAME_POOL), nested)
        for _ in range(rng.randint(0, 2)):
            fn_id = add(EntryKind.FUNCTION, rng.choice(FUNCTION_NAME_POOL), module_id)
            if rng.random() < 0.3:
                add(EntryKind.FUNCTION, rng.choice(FUNCTION_NAME_POOL), fn_id)
        for _ in range(rng.randint(0, 2)):
            add(EntryKind.VARIABLE, rng.choice(VARIABLE_NAME_POOL), module_id)

    from ctxrepair.index.build import derive_tables

    return ProjectDatabase(
        project_root=".",
        entries=entries,
        tables=derive_tables(entries),
        embeddings=[None] * len(entries),
    )
