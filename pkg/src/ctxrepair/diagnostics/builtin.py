"""Offline checker backed solely by the project database.

A conservative fallback for environments without the external analyzer: it
only reports findings it can prove from the index plus the file's own
bindings, and ignores anything it cannot resolve.  Emitted codes mirror the
analyzer's so downstream classification and retrieval behave identically.

Detections:
  E0001  file fails to parse (syntax error)
  E0602  reference to a name absent from the file's bindings and the index
  E0611  ``from M import X`` where module M is indexed but has no X
  E0401  import of a module that is neither indexed nor installed
  E1101  attribute access on a known class with no matching member
  E1121  more positional arguments than the indexed signature accepts
  E1120  fewer arguments than the signature's non-defaulted parameters
"""

from __future__ import annotations

import ast
import builtins
import importlib.util
from dataclasses import dataclass
from typing import Optional

from ..index.models import ContextEntry, EntryKind, ProjectDatabase, Signature
from .models import Diagnostic

_BUILTIN_NAMES = frozenset(dir(builtins)) | {"__file__", "__name__", "__doc__", "__package__"}
_OBJECT_ATTRS = frozenset(dir(object))
_DYNAMIC_ATTR_HOOKS = ("__getattr__", "__getattribute__", "__setattr__")


def _collect_bound_names(tree: ast.AST) -> set[str]:
    bound: set[str] = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.Name) and isinstance(node.ctx, (ast.Store, ast.Del)):
            bound.add(node.id)
        elif isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
            bound.add(node.name)
        elif isinstance(node, ast.arg):
            bound.add(node.arg)
        elif isinstance(node, ast.alias):
            bound.add(node.asname if node.asname else node.name.split(".")[0])
        elif isinstance(node, ast.ExceptHandler) and node.name:
            bound.add(node.name)
        elif isinstance(node, (ast.Global, ast.Nonlocal)):
            bound.update(node.names)
        elif hasattr(ast, "MatchAs") and isinstance(node, ast.MatchAs) and node.name:
            bound.add(node.name)
        elif hasattr(ast, "MatchStar") and isinstance(node, ast.MatchStar) and node.name:
            bound.add(node.name)
    return bound


def _index_names(db: ProjectDatabase) -> set[str]:
    names: set[str] = set()
    for entry in db.entries:
        if entry.kind == EntryKind.MODULE:
            parts = entry.qualified_name.split(".")
            names.add(parts[0])
            names.add(parts[-1])
        else:
            names.add(entry.name)
    return names


def _module_resolvable(db: ProjectDatabase, dotted: str) -> bool:
    """Whether an import target is satisfied by the index or the environment."""
    for entry in db.entries_of_kind(EntryKind.MODULE):
        qn = entry.qualified_name
        if qn == dotted or qn.startswith(dotted + "."):
            return True
    top = dotted.split(".")[0]
    try:
        if importlib.util.find_spec(top) is not None:
            return True
    except (ImportError, ValueError, AttributeError):
        pass
    return False


@dataclass
class _ClassInfo:
    entry: ContextEntry
    members: set[str]
    checkable: bool  # false when bases are unresolvable or attrs are dynamic


def _class_map(db: ProjectDatabase) -> dict[str, _ClassInfo]:
    """Unambiguous simple class name -> member info, inheritance folded in."""
    classes: dict[str, list[ContextEntry]] = {}
    for entry in db.entries_of_kind(EntryKind.CLASS):
        classes.setdefault(entry.name, []).append(entry)

    def resolve(entry: ContextEntry, seen: frozenset[int]) -> Optional[set[str]]:
        members = {child.name for child in db.children_of(entry.id)}
        bases_text = entry.properties.get("bases", "")
        for base in filter(None, (b.strip() for b in bases_text.split(","))):
            base_simple = base.split(".")[-1]
            if base_simple == "object":
                continue
            candidates = classes.get(base_simple, [])
            if len(candidates) != 1 or candidates[0].id in seen:
                return None  # unknown or ambiguous ancestry: not checkable
            inherited = resolve(candidates[0], seen | {candidates[0].id})
            if inherited is None:
                return None
            members |= inherited
        return members

    result: dict[str, _ClassInfo] = {}
    for name, entries in classes.items():
        if len(entries) != 1:
            continue  # ambiguous simple name
        entry = entries[0]
        members = resolve(entry, frozenset({entry.id}))
        checkable = members is not None and not any(
            hook in members for hook in _DYNAMIC_ATTR_HOOKS
        )
        result[name] = _ClassInfo(entry=entry, members=members or set(), checkable=checkable)
    return result


def _infer_instance_types(tree: ast.AST, classes: dict[str, _ClassInfo]) -> dict[str, str]:
    """Names assigned exactly once in the file, from ``x = Cls(...)``."""
    assignment_counts: dict[str, int] = {}
    inferred: dict[str, str] = {}
    for node in ast.walk(tree):
        if not isinstance(node, ast.Assign):
            continue
        for target in node.targets:
            if not isinstance(target, ast.Name):
                continue
            assignment_counts[target.id] = assignment_counts.get(target.id, 0) + 1
            if (
                isinstance(node.value, ast.Call)
                and isinstance(node.value.func, ast.Name)
                and node.value.func.id in classes
            ):
                inferred[target.id] = node.value.func.id
    return {
        name: cls for name, cls in inferred.items() if assignment_counts.get(name, 0) == 1
    }


def _global_functions(db: ProjectDatabase) -> dict[str, ContextEntry]:
    """Unambiguous simple name -> module-level function entry."""
    funcs: dict[str, list[ContextEntry]] = {}
    for entry in db.entries_of_kind(EntryKind.FUNCTION):
        parent = db.entry(entry.parent_id) if entry.parent_id is not None else None
        if parent is not None and parent.kind == EntryKind.MODULE:
            funcs.setdefault(entry.name, []).append(entry)
    return {name: entries[0] for name, entries in funcs.items() if len(entries) == 1}


def _method_of(db: ProjectDatabase, cls: _ClassInfo, name: str) -> Optional[ContextEntry]:
    for child in db.children_of(cls.entry.id):
        if child.kind == EntryKind.FUNCTION and child.name == name:
            return child
    return None


def _effective_params(entry: ContextEntry, drop_first: bool) -> Optional[Signature]:
    sig = entry.signature
    if sig is None:
        return None
    decorators = entry.properties.get("decorators", "")
    if "staticmethod" in decorators:
        drop_first = False
    if not drop_first:
        return sig
    if not sig.params:
        return sig
    return Signature(
        params=sig.params[1:],
        n_defaults=min(sig.n_defaults, len(sig.params) - 1),
        has_vararg=sig.has_vararg,
        kwonly=sig.kwonly,
        n_kwonly_defaults=sig.n_kwonly_defaults,
        has_kwarg=sig.has_kwarg,
    )


def _check_call_arity(
    call: ast.Call, sig: Signature, file: str
) -> list[Diagnostic]:
    if any(isinstance(a, ast.Starred) for a in call.args):
        return []
    if any(kw.arg is None for kw in call.keywords):  # **kwargs forwarding
        return []
    diags: list[Diagnostic] = []
    n_positional = len(call.args)
    if n_positional > len(sig.params) and not sig.has_vararg:
        diags.append(
            Diagnostic.from_checker(
                "E1121",
                "Too many positional arguments for function call",
                file=file,
                line=call.lineno,
                column=call.col_offset,
            )
        )
    keyword_names = {kw.arg for kw in call.keywords}
    required = list(sig.params[: len(sig.params) - sig.n_defaults])
    required += [k for k in sig.kwonly[: len(sig.kwonly) - sig.n_kwonly_defaults]]
    bound_positionally = set(sig.params[:n_positional])
    for param in required:
        if param not in bound_positionally and param not in keyword_names:
            diags.append(
                Diagnostic.from_checker(
                    "E1120",
                    f"No value for argument '{param}' in function call",
                    file=file,
                    line=call.lineno,
                    column=call.col_offset,
                )
            )
    return diags


def builtin_check(
    file_text: str,
    span: tuple[int, int],
    db: ProjectDatabase,
    file: str = "<candidate>",
) -> list[Diagnostic]:
    """Check the candidate region of ``file_text`` against the index.

    Findings are confined to lines within ``span``; unknown constructs are
    ignored so resolvable code never produces a false positive.
    """
    try:
        tree = ast.parse(file_text)
    except SyntaxError as exc:
        line = exc.lineno or span[0]
        return [
            Diagnostic.from_checker(
                "E0001",
                f"Parsing failed: '{exc.msg}'",
                file=file,
                line=line if span[0] <= line <= span[1] else span[0],
            )
        ]

    start, end = span
    bound = _collect_bound_names(tree) | _BUILTIN_NAMES | _index_names(db)
    classes = _class_map(db)
    instance_types = _infer_instance_types(tree, classes)
    global_funcs = _global_functions(db)
    stored_attrs = {
        node.attr
        for node in ast.walk(tree)
        if isinstance(node, ast.Attribute) and isinstance(node.ctx, (ast.Store, ast.Del))
    }

    diags: list[Diagnostic] = []
    seen: set[tuple] = set()

    def emit(diag: Diagnostic) -> None:
        key = (diag.code, diag.message, diag.line)
        if key not in seen:
            seen.add(key)
            diags.append(diag)

    for node in ast.walk(tree):
        lineno = getattr(node, "lineno", None)
        in_span = lineno is not None and start <= lineno <= end

        if isinstance(node, ast.Name) and isinstance(node.ctx, ast.Load) and in_span:
            if node.id not in bound:
                emit(
                    Diagnostic.from_checker(
                        "E0602",
                        f"Undefined variable '{node.id}'",
                        file=file,
                        line=node.lineno,
                        column=node.col_offset,
                    )
                )

        elif isinstance(node, ast.Import) and in_span:
            for alias in node.names:
                if not _module_resolvable(db, alias.name):
                    emit(
                        Diagnostic.from_checker(
                            "E0401",
                            f"Unable to import '{alias.name}'",
                            file=file,
                            line=node.lineno,
                            column=node.col_offset,
                        )
                    )

        elif isinstance(node, ast.ImportFrom) and in_span:
            if node.level or node.module is None:
                continue  # relative imports: outside what the index can prove
            module_entry = db.module_by_name(node.module)
            if module_entry is None:
                if not _module_resolvable(db, node.module):
                    emit(
                        Diagnostic.from_checker(
                            "E0401",
                            f"Unable to import '{node.module}'",
                            file=file,
                            line=node.lineno,
                            column=node.col_offset,
                        )
                    )
                continue
            member_names = {c.name for c in db.children_of(module_entry.id)}
            for alias in node.names:
                if alias.name == "*":
                    continue
                submodule = f"{node.module}.{alias.name}"
                if alias.name in member_names or db.module_by_name(submodule) is not None:
                    continue
                emit(
                    Diagnostic.from_checker(
                        "E0611",
                        f"No name '{alias.name}' in module '{node.module}'",
                        file=file,
                        line=node.lineno,
                        column=node.col_offset,
                    )
                )

        elif isinstance(node, ast.Attribute) and isinstance(node.ctx, ast.Load) and in_span:
            if not isinstance(node.value, ast.Name):
                continue
            receiver = node.value.id
            if receiver in instance_types:
                info = classes[instance_types[receiver]]
                shape = "Instance of"
            elif receiver in classes:
                info = classes[receiver]
                shape = "Class"
            else:
                continue
            if not info.checkable or node.attr in stored_attrs:
                continue
            if node.attr not in info.members and node.attr not in _OBJECT_ATTRS:
                emit(
                    Diagnostic.from_checker(
                        "E1101",
                        f"{shape} '{info.entry.name}' has no '{node.attr}' member",
                        file=file,
                        line=node.lineno,
                        column=node.col_offset,
                    )
                )

        elif isinstance(node, ast.Call) and in_span:
            target: Optional[ContextEntry] = None
            drop_first = False
            if isinstance(node.func, ast.Name):
                if node.func.id in global_funcs:
                    target = global_funcs[node.func.id]
                elif node.func.id in classes:
                    info = classes[node.func.id]
                    init = _method_of(db, info, "__init__")
                    if init is not None:
                        target, drop_first = init, True
            elif isinstance(node.func, ast.Attribute) and isinstance(
                node.func.value, ast.Name
            ):
                receiver = node.func.value.id
                if receiver in instance_types:
                    info = classes[instance_types[receiver]]
                    method = _method_of(db, info, node.func.attr)
                    if method is not None:
                        target, drop_first = method, True
                elif receiver in classes:
                    method = _method_of(db, classes[receiver], node.func.attr)
                    if method is not None:
                        decorators = method.properties.get("decorators", "")
                        target = method
                        drop_first = "classmethod" in decorators
            if target is None:
                continue
            sig = _effective_params(target, drop_first)
            if sig is None:
                continue
            for diag in _check_call_arity(node, sig, file):
                emit(diag)

    diags.sort(key=lambda d: (d.line, d.column, d.code))
    return diags
