"""Fixture files and N-Triples conversion.

Layer: Data model
May only import from: .rdf, .errors, rdflib, stdlib

Fixture format::

    % comment
    #doc dA
    <http://example.org/uA> <http://example.org/p1> <http://example.org/uB> .
    #adoc
    <http://example.org/uA> dA

Triple lines are N-Triples and are parsed with rdflib's N-Triples parser.
Blank-node labels are scoped to the enclosing ``#doc`` section. Loading
fails on any inconsistency rather than repairing it.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import TYPE_CHECKING

from rdflib import BNode
from rdflib import Graph
from rdflib import URIRef
from rdflib import Literal as RdflibLiteral
from rdflib.exceptions import ParserError
from rdflib.plugins.parsers.ntriples import W3CNTriplesParser

from ldql.errors import FixtureError
from ldql.errors import WebIntegrityError
from ldql.rdf import BlankNode
from ldql.rdf import Document
from ldql.rdf import Literal
from ldql.rdf import Triple
from ldql.rdf import Uri
from ldql.rdf import WebOfLinkedData

if TYPE_CHECKING:
    from rdflib.term import Node

    from ldql.rdf import Term

logger = logging.getLogger(__name__)

_DOC_DIRECTIVE = "#doc"
_ADOC_DIRECTIVE = "#adoc"
_COMMENT = "%"

# ---------------------------------------------------------------------------
# rdflib conversion
# ---------------------------------------------------------------------------


class _TripleSink:
    """Collects triples emitted by rdflib's N-Triples parser."""

    def __init__(self) -> None:
        self.triples: list[tuple[Node, Node, Node]] = []

    def triple(self, s: Node, p: Node, o: Node) -> None:
        self.triples.append((s, p, o))


def _from_rdflib(node: Node, labels: dict[BNode, str], scope: str) -> Term:
    if isinstance(node, URIRef):
        return Uri(str(node))
    if isinstance(node, BNode):
        return BlankNode(labels.get(node, str(node)), scope)
    if isinstance(node, RdflibLiteral):
        return Literal(str(node))
    raise FixtureError(f"unsupported RDF term {node!r}")


def _to_rdflib(term: Term) -> Node:
    if isinstance(term, Uri):
        return URIRef(term.value)
    if isinstance(term, BlankNode):
        return BNode(term.label)
    return RdflibLiteral(term.lexical)


class NTriplesReader:
    """Parses N-Triples text into ldql triples for one document scope.

    Blank-node labels are kept as written, so a document read back from its
    own serialization is identical.
    """

    def __init__(self, scope: str):
        self.scope = scope
        self._context: dict[str, BNode] = {}
        self._sink = _TripleSink()
        self._parser = W3CNTriplesParser(self._sink)  # type: ignore[arg-type]

    def feed(self, text: str) -> None:
        self._parser.parsestring(text, bnode_context=self._context)

    def triples(self) -> frozenset[Triple]:
        labels = {node: label for label, node in self._context.items()}
        out = set()
        for s, p, o in self._sink.triples:
            out.add(
                Triple(
                    _from_rdflib(s, labels, self.scope),
                    _from_rdflib(p, labels, self.scope),
                    _from_rdflib(o, labels, self.scope),
                )
            )
        return frozenset(out)


def parse_ntriples(text: str, scope: str) -> frozenset[Triple]:
    """Parse an N-Triples document whose blank nodes belong to *scope*."""
    reader = NTriplesReader(scope)
    try:
        reader.feed(text)
    except ParserError as exc:
        raise FixtureError(f"invalid N-Triples: {exc}") from exc
    return reader.triples()


def document_graph(doc: Document) -> Graph:
    """The rdflib graph holding *doc*'s triples."""
    graph = Graph()
    for triple in doc.data:
        graph.add((_to_rdflib(triple.s), _to_rdflib(triple.p), _to_rdflib(triple.o)))
    return graph


def serialize_document(doc: Document) -> str:
    """*doc* as N-Triples text."""
    return document_graph(doc).serialize(format="nt")


# ---------------------------------------------------------------------------
# Fixture files
# ---------------------------------------------------------------------------


def parse_web(text: str, name: str = "<fixture>") -> WebOfLinkedData:
    """Build a web from fixture *text*; *name* only labels error messages."""
    readers: dict[str, NTriplesReader] = {}
    adoc: dict[Uri, str] = {}
    current: NTriplesReader | None = None
    in_adoc = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(_COMMENT):
            continue
        where = f"{name}:{lineno}"
        if line.startswith(_ADOC_DIRECTIVE):
            if line != _ADOC_DIRECTIVE:
                raise FixtureError(f"{where}: unexpected text after {_ADOC_DIRECTIVE}")
            current, in_adoc = None, True
            continue
        if line.startswith(_DOC_DIRECTIVE):
            parts = line.split()
            if parts[0] != _DOC_DIRECTIVE or len(parts) != 2:
                raise FixtureError(f"{where}: expected '{_DOC_DIRECTIVE} <doc-id>'")
            doc_id = parts[1]
            if doc_id in readers:
                raise FixtureError(f"{where}: document {doc_id!r} declared twice")
            current = readers[doc_id] = NTriplesReader(doc_id)
            in_adoc = False
            continue
        if in_adoc:
            uri, doc_id = _parse_adoc_entry(line, where)
            if uri in adoc and adoc[uri] != doc_id:
                raise FixtureError(f"{where}: {uri.n3()} is mapped to two documents")
            adoc[uri] = doc_id
            continue
        if current is None:
            raise FixtureError(f"{where}: triple outside of a {_DOC_DIRECTIVE} section")
        try:
            current.feed(line)
        except ParserError as exc:
            raise FixtureError(f"{where}: invalid triple: {exc}") from exc

    labels: dict[str, str] = {}
    docs: dict[str, Document] = {}
    for doc_id, reader in readers.items():
        triples = reader.triples()
        for triple in triples:
            for term in triple:
                if isinstance(term, BlankNode):
                    owner = labels.setdefault(term.label, doc_id)
                    if owner != doc_id:
                        raise FixtureError(
                            f"{name}: blank node label _:{term.label} is used by "
                            f"documents {owner!r} and {doc_id!r}"
                        )
        docs[doc_id] = Document(doc_id, triples)

    try:
        web = WebOfLinkedData(docs=docs, adoc=adoc)
    except WebIntegrityError as exc:
        raise FixtureError(f"{name}: {exc}") from exc
    logger.debug("loaded %s: %d documents, %d URIs in dom(adoc)", name, len(docs), len(adoc))
    return web


def _parse_adoc_entry(line: str, where: str) -> tuple[Uri, str]:
    parts = line.split()
    if len(parts) != 2 or not (parts[0].startswith("<") and parts[0].endswith(">")):
        raise FixtureError(f"{where}: expected '<uri> <doc-id>' in {_ADOC_DIRECTIVE} section")
    value = parts[0][1:-1]
    if not value:
        raise FixtureError(f"{where}: empty URI")
    return Uri(value), parts[1]


def load_web(path: str | Path) -> WebOfLinkedData:
    """Load a web from a fixture file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FixtureError(f"cannot read fixture {path}: {exc}") from exc
    return parse_web(text, name=str(path))


def serialize_web(web: WebOfLinkedData) -> str:
    """Fixture text for *web*; :func:`parse_web` reads it back unchanged."""
    lines: list[str] = []
    for doc_id in sorted(web.docs):
        lines.append(f"{_DOC_DIRECTIVE} {doc_id}")
        lines.extend(sorted(t.n3() for t in web.docs[doc_id].data))
    lines.append(_ADOC_DIRECTIVE)
    for uri in sorted(web.adoc):
        lines.append(f"{uri.n3()} {web.adoc[uri]}")
    return "\n".join(lines) + "\n"
