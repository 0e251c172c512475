"""RDF terms, documents, Webs of Linked Data and their link graphs.

Layer: Data model
May only import from: .errors, stdlib

A Web of Linked Data is a finite set of documents plus a partial, surjective
map ``adoc`` from URIs to documents. Everything here is immutable once
constructed, so webs and documents can be shared freely between concurrent
evaluators.

Link patterns live here too because matching them against link-graph edges
is part of the data model rather than of the query language.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable
from collections.abc import Iterator
from collections.abc import Mapping
from dataclasses import dataclass
from dataclasses import field
from types import MappingProxyType
from typing import Union

from ldql.errors import WebIntegrityError

# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Uri:
    value: str

    def __post_init__(self) -> None:
        if not self.value:
            raise ValueError("a URI must not be empty")

    def n3(self) -> str:
        return f"<{self.value}>"

    def __str__(self) -> str:
        return self.n3()


@dataclass(frozen=True, order=True)
class BlankNode:
    """A blank node; ``scope`` is the id of the only document it occurs in."""

    label: str
    scope: str

    def n3(self) -> str:
        return f"_:{self.label}"

    def __str__(self) -> str:
        return self.n3()


@dataclass(frozen=True, order=True)
class Literal:
    lexical: str

    def n3(self) -> str:
        escaped = (
            self.lexical.replace("\\", "\\\\")
            .replace('"', '\\"')
            .replace("\n", "\\n")
            .replace("\r", "\\r")
        )
        return f'"{escaped}"'

    def __str__(self) -> str:
        return self.n3()


Term = Union[Uri, BlankNode, Literal]


def term_key(term: Term) -> tuple[int, str]:
    """Total order over terms: URIs, then blank nodes, then literals."""
    if isinstance(term, Uri):
        return (0, term.value)
    if isinstance(term, BlankNode):
        return (1, f"{term.scope}\x00{term.label}")
    return (2, term.lexical)


# ---------------------------------------------------------------------------
# Triples and documents
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Triple:
    s: Term
    p: Term
    o: Term

    def __post_init__(self) -> None:
        if isinstance(self.s, Literal):
            raise ValueError(f"literal {self.s} cannot be a subject")
        if not isinstance(self.p, Uri):
            raise ValueError(f"predicate {self.p} must be a URI")

    def __iter__(self) -> Iterator[Term]:
        return iter((self.s, self.p, self.o))

    def uris(self) -> frozenset[Uri]:
        return frozenset(t for t in self if isinstance(t, Uri))

    def n3(self) -> str:
        return f"{self.s.n3()} {self.p.n3()} {self.o.n3()} ."


def uris_of(t: Triple) -> frozenset[Uri]:
    """Every URI occurring in any position of *t*."""
    return t.uris()


@dataclass(frozen=True)
class Document:
    id: str
    data: frozenset[Triple] = frozenset()

    def __post_init__(self) -> None:
        for triple in self.data:
            for term in triple:
                if isinstance(term, BlankNode) and term.scope != self.id:
                    raise WebIntegrityError(
                        f"blank node {term.n3()} of document {term.scope!r} "
                        f"occurs in document {self.id!r}"
                    )


# ---------------------------------------------------------------------------
# Webs of Linked Data
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WebOfLinkedData:
    """A finite document set with its partial, surjective ``adoc`` map."""

    docs: Mapping[str, Document]
    adoc: Mapping[Uri, str]
    _uris: frozenset[Uri] = field(init=False, repr=False)
    _terms: frozenset[Term] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        docs = MappingProxyType(dict(self.docs))
        adoc = MappingProxyType(dict(self.adoc))
        for key, doc in docs.items():
            if key != doc.id:
                raise WebIntegrityError(f"document registered as {key!r} has id {doc.id!r}")
        for uri, doc_id in adoc.items():
            if doc_id not in docs:
                raise WebIntegrityError(f"adoc maps {uri.n3()} to unknown document {doc_id!r}")
        unreachable = set(docs) - set(adoc.values())
        if unreachable:
            raise WebIntegrityError(
                "adoc is not surjective; no URI retrieves document(s) "
                + ", ".join(sorted(unreachable))
            )
        terms: set[Term] = set()
        for doc in docs.values():
            for triple in doc.data:
                terms.update(triple)
        object.__setattr__(self, "docs", docs)
        object.__setattr__(self, "adoc", adoc)
        object.__setattr__(self, "_terms", frozenset(terms))
        object.__setattr__(self, "_uris", frozenset(t for t in terms if isinstance(t, Uri)))

    @classmethod
    def empty(cls) -> WebOfLinkedData:
        return cls(docs={}, adoc={})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WebOfLinkedData):
            return NotImplemented
        return dict(self.docs) == dict(other.docs) and dict(self.adoc) == dict(other.adoc)

    def __hash__(self) -> int:
        return hash((frozenset(self.docs.values()), frozenset(self.adoc.items())))

    def dom(self) -> frozenset[Uri]:
        return frozenset(self.adoc)

    def doc_for(self, uri: Uri) -> Document | None:
        doc_id = self.adoc.get(uri)
        return None if doc_id is None else self.docs[doc_id]

    def data_of(self, uri: Uri) -> frozenset[Triple]:
        doc = self.doc_for(uri)
        return frozenset() if doc is None else doc.data

    def terms(self) -> frozenset[Term]:
        """All RDF terms occurring in any triple of any document."""
        return self._terms

    def uris(self) -> frozenset[Uri]:
        """All URIs occurring in any triple of any document."""
        return self._uris


@dataclass(frozen=True)
class LinkGraphEdge:
    src: str
    triple: Triple
    via: Uri
    tgt: str


def link_graph(w: WebOfLinkedData) -> frozenset[LinkGraphEdge]:
    """All data links of *w*: one edge per (document, triple, URI in dom(adoc))."""
    edges = set()
    for doc in w.docs.values():
        for triple in doc.data:
            for uri in triple.uris():
                tgt = w.adoc.get(uri)
                if tgt is not None:
                    edges.add(LinkGraphEdge(doc.id, triple, uri, tgt))
    return frozenset(edges)


# ---------------------------------------------------------------------------
# Link patterns
# ---------------------------------------------------------------------------


class Marker(enum.Enum):
    CONTEXT = "+"
    WILDCARD = "_"

    def n3(self) -> str:
        return self.value


PatternTerm = Union[Uri, Literal, Marker]


@dataclass(frozen=True)
class LinkPattern:
    s: PatternTerm
    p: PatternTerm
    o: PatternTerm

    def __post_init__(self) -> None:
        if isinstance(self.s, Literal) or isinstance(self.p, Literal):
            raise ValueError("literals may only occur in the object position of a link pattern")

    def __iter__(self) -> Iterator[PatternTerm]:
        return iter((self.s, self.p, self.o))

    def wildcard_positions(self) -> tuple[int, ...]:
        return tuple(i for i, t in enumerate(self) if t is Marker.WILDCARD)


def matches(edge_label: tuple[Triple, Uri], lp: LinkPattern, ctx: Uri) -> bool:
    """Whether the data link ``(triple, via)`` matches *lp* in the context of *ctx*."""
    triple, via = edge_label
    selected = False
    for x, y in zip(triple, lp):
        if y is Marker.WILDCARD:
            selected = selected or x == via
        elif y is Marker.CONTEXT:
            if x != ctx:
                return False
        elif x != y:
            return False
    return selected


# ---------------------------------------------------------------------------
# Datasets
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RdfDataset:
    default: frozenset[Triple]
    named: Mapping[Uri, frozenset[Triple]]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RdfDataset):
            return NotImplemented
        return self.default == other.default and dict(self.named) == dict(other.named)

    def __hash__(self) -> int:
        return hash((self.default, frozenset(self.named.items())))

    @classmethod
    def of_graph(cls, graph: frozenset[Triple]) -> RdfDataset:
        """A dataset with *graph* as default graph and no named graphs."""
        return cls(default=graph, named={})


def build_dataset(w: WebOfLinkedData, u_set: Iterable[Uri]) -> RdfDataset:
    """The dataset of the documents retrieved by *u_set*; URIs outside dom(adoc) are skipped."""
    named: dict[Uri, frozenset[Triple]] = {}
    default: set[Triple] = set()
    for uri in u_set:
        doc = w.doc_for(uri)
        if doc is not None:
            named[uri] = doc.data
            default.update(doc.data)
    return RdfDataset(default=frozenset(default), named=named)
