"""Abstract syntax of link path expressions and LDQL queries.

Layer: Language
May only import from: .rdf, .algebra, stdlib

Queries and LPEs are frozen dataclasses, so structurally equal trees compare
and hash equal. ``And`` and ``Union`` are binary; parsing keeps the
parenthesisation the user wrote.
"""

from __future__ import annotations

import re
from collections.abc import Iterable
from collections.abc import Iterator
from dataclasses import dataclass
from typing import Union

from ldql.algebra import GraphPattern
from ldql.algebra import Var
from ldql.algebra import pattern_uris
from ldql.algebra import pattern_vars
from ldql.rdf import LinkPattern
from ldql.rdf import Uri

# ---------------------------------------------------------------------------
# Link path expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Epsilon:
    pass


@dataclass(frozen=True)
class Pattern:
    lp: LinkPattern


@dataclass(frozen=True)
class Concat:
    left: Lpe
    right: Lpe


@dataclass(frozen=True)
class Alt:
    left: Lpe
    right: Lpe


@dataclass(frozen=True)
class Star:
    inner: Lpe


@dataclass(frozen=True)
class Test:
    inner: Lpe


@dataclass(frozen=True)
class NavSub:
    """``(?v : q)``: navigate to the URIs bound to *var* by *query* evaluated at the context."""

    var: Var
    query: Query


Lpe = Union[Epsilon, Pattern, Concat, Alt, Star, Test, NavSub]

EPS = Epsilon()

# ---------------------------------------------------------------------------
# Queries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Basic:
    lpe: Lpe
    pattern: GraphPattern


@dataclass(frozen=True)
class SeedUris:
    uris: frozenset[Uri]
    query: Query


@dataclass(frozen=True)
class SeedVar:
    var: Var
    query: Query


@dataclass(frozen=True)
class And:
    left: Query
    right: Query


@dataclass(frozen=True)
class QueryUnion:
    left: Query
    right: Query


@dataclass(frozen=True)
class Project:
    variables: frozenset[Var]
    query: Query


Query = Union[Basic, SeedUris, SeedVar, And, QueryUnion, Project]


def and_all(queries: Iterable[Query]) -> Query:
    """Left-nested conjunction of a non-empty sequence of queries."""
    items = list(queries)
    if not items:
        raise ValueError("and_all needs at least one query")
    out = items[0]
    for q in items[1:]:
        out = And(out, q)
    return out


def union_all(queries: Iterable[Query]) -> Query:
    """Left-nested UNION of a non-empty sequence of queries."""
    items = list(queries)
    if not items:
        raise ValueError("union_all needs at least one query")
    out = items[0]
    for q in items[1:]:
        out = QueryUnion(out, q)
    return out


def alt_all(lpes: Iterable[Lpe]) -> Lpe:
    items = list(lpes)
    if not items:
        raise ValueError("alt_all needs at least one LPE")
    out = items[0]
    for lpe in items[1:]:
        out = Alt(out, lpe)
    return out


# ---------------------------------------------------------------------------
# Traversals
# ---------------------------------------------------------------------------


def lpe_children(l: Lpe) -> Iterator[Lpe]:
    if isinstance(l, (Concat, Alt)):
        yield l.left
        yield l.right
    elif isinstance(l, (Star, Test)):
        yield l.inner


def navsub_queries(l: Lpe) -> Iterator[NavSub]:
    """NavSub nodes of *l* in preorder, not descending into their queries."""
    if isinstance(l, NavSub):
        yield l
        return
    for child in lpe_children(l):
        yield from navsub_queries(child)


def query_children(q: Query) -> Iterator[Query]:
    if isinstance(q, (And, QueryUnion)):
        yield q.left
        yield q.right
    elif isinstance(q, (SeedUris, SeedVar, Project)):
        yield q.query


def lpe_uris(l: Lpe) -> frozenset[Uri]:
    out: set[Uri] = set()
    if isinstance(l, Pattern):
        out.update(t for t in l.lp if isinstance(t, Uri))
    elif isinstance(l, NavSub):
        out.update(query_uris(l.query))
    for child in lpe_children(l):
        out.update(lpe_uris(child))
    return frozenset(out)


def query_uris(q: Query) -> frozenset[Uri]:
    """Every URI mentioned anywhere in *q*, including seeds and nested queries."""
    if isinstance(q, Basic):
        return lpe_uris(q.lpe) | pattern_uris(q.pattern)
    out: set[Uri] = set(q.uris) if isinstance(q, SeedUris) else set()
    for child in query_children(q):
        out.update(query_uris(child))
    return frozenset(out)


def lpe_vars(l: Lpe) -> frozenset[Var]:
    out: set[Var] = set()
    if isinstance(l, NavSub):
        out.add(l.var)
        out.update(query_vars(l.query))
    for child in lpe_children(l):
        out.update(lpe_vars(child))
    return frozenset(out)


def query_vars(q: Query) -> frozenset[Var]:
    """Every variable mentioned anywhere in *q*, nested scopes included."""
    if isinstance(q, Basic):
        return lpe_vars(q.lpe) | pattern_vars(q.pattern)
    out: set[Var] = set()
    if isinstance(q, SeedVar):
        out.add(q.var)
    elif isinstance(q, Project):
        out.update(q.variables)
    for child in query_children(q):
        out.update(query_vars(child))
    return frozenset(out)


def query_size(q: Query) -> int:
    """Number of query-level nodes (LPEs and patterns count as one)."""
    return 1 + sum(query_size(child) for child in query_children(q))


# ---------------------------------------------------------------------------
# Fresh variables
# ---------------------------------------------------------------------------

RESERVED_VAR = re.compile(r"_g\d+")


class FreshVars:
    """Supplies variables from the reserved ``?_gN`` namespace.

    Names already used by the queries passed to ``avoid`` are skipped, so
    generated variables never capture user variables.
    """

    def __init__(self, avoid: Iterable[Var] = ()):
        self._taken = {v.name for v in avoid}
        self._next = 0

    def avoid(self, variables: Iterable[Var]) -> None:
        self._taken.update(v.name for v in variables)

    def __call__(self) -> Var:
        while True:
            name = f"_g{self._next}"
            self._next += 1
            if name not in self._taken:
                self._taken.add(name)
                return Var(name)
