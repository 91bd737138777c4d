"""Typed clause structure for structural queries.

The surface form is ``FROM <kind> <var>, ... WHERE <pred> and <pred> ...
SELECT <var>[.getDefinition()], ...``.  Predicates are the fixed set used by
the retrieval demonstrations: containment, name and scope equality, source
membership, init-method tests, and negation of any of these.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..index.models import EntryKind


@dataclass(frozen=True)
class Contains:
    container: str
    member: str

    def render(self) -> str:
        return f"{self.container}.contains({self.member})"


@dataclass(frozen=True)
class NameEquals:
    var: str
    literal: str

    def render(self) -> str:
        return f"{self.var}.getName() = '{self.literal}'"


@dataclass(frozen=True)
class ScopeEquals:
    var: str
    scope: str

    def render(self) -> str:
        return f"{self.var}.getScope() = {self.scope}"


@dataclass(frozen=True)
class InSource:
    var: str

    def render(self) -> str:
        return f"{self.var}.inSource()"


@dataclass(frozen=True)
class IsInitMethod:
    var: str

    def render(self) -> str:
        return f"{self.var}.isInitMethod()"


@dataclass(frozen=True)
class Negation:
    inner: "Predicate"

    def render(self) -> str:
        return f"not {self.inner.render()}"


Predicate = Union[Contains, NameEquals, ScopeEquals, InSource, IsInitMethod, Negation]


@dataclass(frozen=True)
class FromVar:
    name: str
    kind: EntryKind


@dataclass(frozen=True)
class SelectItem:
    var: str
    definition: bool = False  # wrapped in getDefinition(.)

    def render(self) -> str:
        return f"{self.var}.getDefinition()" if self.definition else self.var


def _predicate_vars(pred: Predicate) -> set[str]:
    if isinstance(pred, Contains):
        return {pred.container, pred.member}
    if isinstance(pred, NameEquals):
        return {pred.var}
    if isinstance(pred, ScopeEquals):
        return {pred.var, pred.scope}
    if isinstance(pred, (InSource, IsInitMethod)):
        return {pred.var}
    return _predicate_vars(pred.inner)


@dataclass(frozen=True)
class StructuralQuery:
    from_clause: tuple[FromVar, ...]
    where_clause: tuple[Predicate, ...]
    select_clause: tuple[SelectItem, ...]

    def declared_vars(self) -> set[str]:
        return {fv.name for fv in self.from_clause}

    def referenced_vars(self) -> set[str]:
        refs: set[str] = {item.var for item in self.select_clause}
        for pred in self.where_clause:
            refs |= _predicate_vars(pred)
        return refs

    def render(self) -> str:
        parts = []
        if self.from_clause:
            froms = ", ".join(f"{fv.kind.value} {fv.name}" for fv in self.from_clause)
            parts.append(f"FROM {froms}")
        if self.where_clause:
            preds = " and ".join(p.render() for p in self.where_clause)
            parts.append(f"WHERE {preds}")
        selects = ", ".join(item.render() for item in self.select_clause)
        parts.append(f"SELECT {selects}")
        return " ".join(parts)


__all__ = [
    "Contains",
    "FromVar",
    "InSource",
    "IsInitMethod",
    "NameEquals",
    "Negation",
    "Predicate",
    "ScopeEquals",
    "SelectItem",
    "StructuralQuery",
]
