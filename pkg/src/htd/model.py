"""Query and database model plus the text front-end.

Queries are datalog-style rules ``ans(X) <- r(X,Y), s(Y).``; fact files are
one ground atom per line.  Variables start with an uppercase letter,
constants are lowercase/digit identifiers or single-quoted text, and ``%``
starts a line comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import DatabaseFormatError, QuerySyntaxError

_VAR_RE = re.compile(r"[A-Z][A-Za-z0-9_']*")
_CONST_RE = re.compile(r"[a-z0-9][A-Za-z0-9_]*")


@dataclass(frozen=True, order=True)
class Term:
    kind: str  # "variable" | "constant"
    name: str

    @property
    def is_variable(self) -> bool:
        return self.kind == "variable"

    def __str__(self) -> str:
        if self.kind == "constant" and not _CONST_RE.fullmatch(self.name):
            return "'" + self.name + "'"
        return self.name


def variable(name: str) -> Term:
    return Term("variable", name)


def constant(name: str) -> Term:
    return Term("constant", name)


@dataclass(frozen=True)
class Atom:
    relation: str
    args: tuple[Term, ...]
    index: int = -1  # 0-based position in the query body; -1 for heads

    def variables(self) -> frozenset[str]:
        return frozenset(t.name for t in self.args if t.is_variable)

    def __str__(self) -> str:
        if not self.args:
            return self.relation
        return f"{self.relation}({','.join(str(t) for t in self.args)})"


@dataclass(frozen=True)
class ConjunctiveQuery:
    head: Atom
    body: tuple[Atom, ...]

    def __post_init__(self):
        body_vars = self.variables()
        for t in self.head.args:
            if t.is_variable and t.name not in body_vars:
                raise QuerySyntaxError(
                    f"unsafe head variable {t.name}: does not occur in the body"
                )

    def variables(self) -> frozenset[str]:
        """var(Q): the variables occurring in body atoms."""
        out: set[str] = set()
        for a in self.body:
            out.update(a.variables())
        return frozenset(out)

    @property
    def is_boolean(self) -> bool:
        return not any(t.is_variable for t in self.head.args)

    def atom(self, index: int) -> Atom:
        return self.body[index]

    def __str__(self) -> str:
        body = ", ".join(str(a) for a in self.body)
        return f"{self.head} <- {body}."


@dataclass(frozen=True)
class Hypergraph:
    """Variables of a query plus one edge per body atom with >= 1 variable."""

    vertices: frozenset[str]
    edges: tuple[tuple[int, frozenset[str]], ...]


@dataclass(frozen=True)
class Database:
    relations: dict[str, frozenset[tuple[str, ...]]]
    arities: dict[str, int] = field(default_factory=dict)

    @property
    def universe(self) -> frozenset[str]:
        out: set[str] = set()
        for tuples in self.relations.values():
            for t in tuples:
                out.update(t)
        return frozenset(out)

    def tuples(self, relation: str) -> frozenset[tuple[str, ...]]:
        return self.relations.get(relation, frozenset())


# ---------------------------------------------------------------------------
# tokenizer / parsers


@dataclass(frozen=True)
class _Token:
    kind: str  # name | variable | quoted | punct | end
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
        elif c in " \t\r":
            i += 1
            col += 1
        elif c == "%":
            while i < n and text[i] != "\n":
                i += 1
        elif c == "'":
            j = text.find("'", i + 1)
            if j < 0:
                raise QuerySyntaxError("unterminated quoted constant", line, col)
            tokens.append(_Token("quoted", text[i + 1 : j], line, col))
            col += j - i + 1
            i = j + 1
        elif text.startswith("<-", i):
            tokens.append(_Token("punct", "<-", line, col))
            i += 2
            col += 2
        elif c in "(),.":
            tokens.append(_Token("punct", c, line, col))
            i += 1
            col += 1
        else:
            m = _VAR_RE.match(text, i) or _CONST_RE.match(text, i)
            if m is None:
                raise QuerySyntaxError(f"unexpected character {c!r}", line, col)
            kind = "variable" if text[i].isupper() else "name"
            tokens.append(_Token(kind, m.group(), line, col))
            col += m.end() - i
            i = m.end()
    tokens.append(_Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def fail(self, message: str):
        t = self.peek()
        raise QuerySyntaxError(message, t.line, t.column)

    def expect(self, text: str) -> _Token:
        t = self.next()
        if t.text != text or t.kind == "end":
            raise QuerySyntaxError(f"expected {text!r}", t.line, t.column)
        return t

    def term(self) -> Term:
        t = self.next()
        if t.kind == "variable":
            return variable(t.text)
        if t.kind in ("name", "quoted"):
            return constant(t.text)
        raise QuerySyntaxError("expected a term", t.line, t.column)

    def termlist(self) -> tuple[Term, ...]:
        terms = [self.term()]
        while self.peek().text == ",":
            self.next()
            terms.append(self.term())
        return tuple(terms)

    def atom(self, index: int = -1) -> Atom:
        t = self.next()
        if t.kind != "name":
            raise QuerySyntaxError("expected a relation name", t.line, t.column)
        args: tuple[Term, ...] = ()
        if self.peek().text == "(":
            self.next()
            args = self.termlist()
            self.expect(")")
        return Atom(t.text, args, index)


def parse_query(text: str) -> ConjunctiveQuery:
    """Parse a single rule into a ConjunctiveQuery."""
    if not text.strip():
        raise QuerySyntaxError("empty input")
    p = _Parser(text)
    head = p.atom()
    p.expect("<-")
    body: list[Atom] = []
    if p.peek().text != ".":
        body.append(p.atom(0))
        while p.peek().text == ",":
            p.next()
            body.append(p.atom(len(body)))
    p.expect(".")
    if p.peek().kind != "end":
        p.fail("trailing text after query")
    return ConjunctiveQuery(head, tuple(body))


def print_query(q: ConjunctiveQuery) -> str:
    return str(q)


def parse_database(text: str) -> Database:
    """Parse a fact file (one ground atom per line) into a Database."""
    relations: dict[str, set[tuple[str, ...]]] = {}
    arities: dict[str, int] = {}
    p = _Parser(text)
    while p.peek().kind != "end":
        atom = p.atom()
        p.expect(".")
        row = []
        for t in atom.args:
            if t.is_variable:
                raise DatabaseFormatError(
                    f"non-ground term {t.name} in fact {atom.relation}"
                )
            row.append(t.name)
        arity = len(row)
        if atom.relation in arities and arities[atom.relation] != arity:
            raise DatabaseFormatError(
                f"arity mismatch for relation {atom.relation}: "
                f"{arities[atom.relation]} vs {arity}"
            )
        arities[atom.relation] = arity
        relations.setdefault(atom.relation, set()).add(tuple(row))
    return Database({r: frozenset(ts) for r, ts in relations.items()}, arities)


def query_hypergraph(q: ConjunctiveQuery) -> Hypergraph:
    """H(Q): vertices are variables, one edge var(A) per body atom with vars."""
    edges = []
    for a in q.body:
        vs = a.variables()
        if vs:
            edges.append((a.index, vs))
    return Hypergraph(q.variables(), tuple(edges))


def atoms_vars(q: ConjunctiveQuery, indices: Iterable[int]) -> frozenset[str]:
    """var(R) for a set R of body-atom indices."""
    out: set[str] = set()
    for i in indices:
        out.update(q.body[i].variables())
    return frozenset(out)
