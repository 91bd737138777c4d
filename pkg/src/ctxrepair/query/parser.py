"""Parser for the structural query surface form.

Keywords and predicate names are case-insensitive; parens after predicate
names are optional (demonstration corpora write both ``getName() = 'x'`` and
``getName = 'x'``).  String literals are single-quoted with no escapes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from ..errors import QuerySyntaxError
from ..index.models import EntryKind
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

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<string>'[^']*')
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[.,()=])
    """,
    re.VERBOSE,
)

_KIND_NAMES = {
    "module": EntryKind.MODULE,
    "class": EntryKind.CLASS,
    "function": EntryKind.FUNCTION,
    "variable": EntryKind.VARIABLE,
}

_PREDICATE_NAMES = {"contains", "getname", "getscope", "insource", "isinitmethod"}


@dataclass(frozen=True)
class _Token:
    kind: str  # "string" | "ident" | "punct"
    value: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise QuerySyntaxError("unexpected character", text, pos)
        pos = match.end()
        if match.lastgroup == "ws":
            continue
        value = match.group()
        if match.lastgroup == "string":
            value = value[1:-1]
        tokens.append(_Token(kind=match.lastgroup, value=value, pos=match.start()))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    # -- token helpers ----------------------------------------------------

    def _peek(self) -> Optional[_Token]:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def _next(self, expect: str) -> _Token:
        tok = self._peek()
        if tok is None:
            raise QuerySyntaxError(f"expected {expect}, found end of query", self.text, len(self.text))
        self.index += 1
        return tok

    def _at_keyword(self, word: str) -> bool:
        tok = self._peek()
        return tok is not None and tok.kind == "ident" and tok.value.lower() == word

    def _eat_keyword(self, word: str) -> None:
        if not self._at_keyword(word):
            tok = self._peek()
            pos = tok.pos if tok else len(self.text)
            raise QuerySyntaxError(f"expected keyword {word.upper()}", self.text, pos)
        self.index += 1

    def _eat_punct(self, char: str) -> None:
        tok = self._next(repr(char))
        if tok.kind != "punct" or tok.value != char:
            raise QuerySyntaxError(f"expected {char!r}", self.text, tok.pos)

    def _try_punct(self, char: str) -> bool:
        tok = self._peek()
        if tok is not None and tok.kind == "punct" and tok.value == char:
            self.index += 1
            return True
        return False

    def _ident(self, what: str) -> _Token:
        tok = self._next(what)
        if tok.kind != "ident":
            raise QuerySyntaxError(f"expected {what}", self.text, tok.pos)
        return tok

    def _optional_parens(self) -> None:
        if self._try_punct("("):
            self._eat_punct(")")

    # -- grammar ----------------------------------------------------------

    def parse(self) -> StructuralQuery:
        from_vars: list[FromVar] = []
        if self._at_keyword("from"):
            self.index += 1
            from_vars = self._from_list()
        preds: list[Predicate] = []
        if self._at_keyword("where"):
            self.index += 1
            preds = self._pred_list()
        self._eat_keyword("select")
        selects = self._select_list()
        if self._peek() is not None:
            raise QuerySyntaxError("trailing input after SELECT clause", self.text, self._peek().pos)

        query = StructuralQuery(
            from_clause=tuple(from_vars),
            where_clause=tuple(preds),
            select_clause=tuple(selects),
        )
        declared = query.declared_vars()
        if len(declared) != len(from_vars):
            raise QuerySyntaxError("duplicate variable in FROM clause", self.text, 0)
        undeclared = sorted(query.referenced_vars() - declared)
        if undeclared:
            raise QuerySyntaxError(f"undeclared variable: {', '.join(undeclared)}", self.text, 0)
        return query

    def _from_list(self) -> list[FromVar]:
        items = [self._from_var()]
        while self._try_punct(","):
            items.append(self._from_var())
        return items

    def _from_var(self) -> FromVar:
        kind_tok = self._ident("entry kind")
        kind = _KIND_NAMES.get(kind_tok.value.lower())
        if kind is None:
            raise QuerySyntaxError(
                f"unknown entry kind {kind_tok.value!r}", self.text, kind_tok.pos
            )
        var_tok = self._ident("variable name")
        return FromVar(name=var_tok.value, kind=kind)

    def _pred_list(self) -> list[Predicate]:
        preds = [self._predicate()]
        while self._at_keyword("and"):
            self.index += 1
            preds.append(self._predicate())
        return preds

    def _predicate(self) -> Predicate:
        if self._at_keyword("not"):
            self.index += 1
            return Negation(self._predicate())
        var_tok = self._ident("variable name")
        self._eat_punct(".")
        method_tok = self._ident("predicate name")
        method = method_tok.value.lower()
        if method not in _PREDICATE_NAMES:
            raise QuerySyntaxError(
                f"unknown predicate {method_tok.value!r}", self.text, method_tok.pos
            )
        if method == "contains":
            self._eat_punct("(")
            member = self._ident("variable name")
            self._eat_punct(")")
            return Contains(container=var_tok.value, member=member.value)
        if method == "getname":
            self._optional_parens()
            self._eat_punct("=")
            literal = self._next("string literal")
            if literal.kind != "string":
                raise QuerySyntaxError("expected string literal", self.text, literal.pos)
            return NameEquals(var=var_tok.value, literal=literal.value)
        if method == "getscope":
            self._optional_parens()
            self._eat_punct("=")
            scope = self._ident("variable name")
            return ScopeEquals(var=var_tok.value, scope=scope.value)
        if method == "insource":
            self._optional_parens()
            return InSource(var=var_tok.value)
        self._optional_parens()
        return IsInitMethod(var=var_tok.value)

    def _select_list(self) -> list[SelectItem]:
        items = [self._select_item()]
        while self._try_punct(","):
            items.append(self._select_item())
        return items

    def _select_item(self) -> SelectItem:
        var_tok = self._ident("variable name")
        if self._try_punct("."):
            method_tok = self._ident("getDefinition")
            if method_tok.value.lower() != "getdefinition":
                raise QuerySyntaxError(
                    f"unknown select wrapper {method_tok.value!r}", self.text, method_tok.pos
                )
            self._optional_parens()
            return SelectItem(var=var_tok.value, definition=True)
        return SelectItem(var=var_tok.value)


def parse_query(text: str) -> StructuralQuery:
    """Parse the FROM/WHERE/SELECT surface form into the typed clause structure."""
    return _Parser(text).parse()
