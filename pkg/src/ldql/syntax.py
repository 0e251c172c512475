"""Concrete syntax for LDQL queries, LPEs, graph patterns and expressions.

Layer: Language
May only import from: .errors, .rdf, .algebra, .lang, stdlib

Grammar (whitespace-insensitive, ``#`` starts a comment)::

    query   := "<<" lpe "," pattern ">>"
             | "SEED" "{" iri* "}" query | "SEED" iri query | "SEED" var query
             | "(" query ( ("AND" query)+ | ("UNION" query)+ )? ")"
             | "PROJECT" "{" var* "}" "(" query ")"
    lpe     := seq ("|" seq)*
    seq     := post ("/" post)*
    post    := atom "*"*
    atom    := "eps" | "{" lterm lterm lterm "}" | "[" lpe "]"
             | "(" var ":" query ")" | "(" lpe ")"
    lterm   := "+" | "_" | iri | literal
    pattern := "{" (slot slot slot ("." slot slot slot)*)? "}"
             | "GRAPH" (iri | var) pattern
             | "(" pattern ( ("AND" | "OPT" | "UNION") pattern
                           | "FILTER" expr | "BIND" expr "AS" var )* ")"
    expr    := conj ("||" conj)*
    conj    := unary ("&&" unary)*
    unary   := "!" unary | prim (("=" | "!=") prim)?
    prim    := var | iri | literal | "(" expr ")"

Sequences of AND or UNION nest to the left. The serializer emits the
fewest LPE parentheses that still parse back to the same tree; every
composite pattern and expression is parenthesised.

Variables named ``?_gN`` are reserved for generated queries and are only
accepted with ``allow_reserved=True``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any
from typing import Callable

from ldql.algebra import AndExpr
from ldql.algebra import Bgp
from ldql.algebra import Bind
from ldql.algebra import Const
from ldql.algebra import Eq
from ldql.algebra import Expr
from ldql.algebra import Filter
from ldql.algebra import Graph
from ldql.algebra import GraphPattern
from ldql.algebra import Join
from ldql.algebra import LeftJoin
from ldql.algebra import Neq
from ldql.algebra import NotExpr
from ldql.algebra import OrExpr
from ldql.algebra import PatternSlot
from ldql.algebra import PatternUnion
from ldql.algebra import TriplePattern
from ldql.algebra import Var
from ldql.algebra import pattern_vars
from ldql.errors import ParseError
from ldql.lang import EPS
from ldql.lang import RESERVED_VAR
from ldql.lang import Alt
from ldql.lang import And
from ldql.lang import Basic
from ldql.lang import Concat
from ldql.lang import Epsilon
from ldql.lang import Lpe
from ldql.lang import NavSub
from ldql.lang import Pattern
from ldql.lang import Project
from ldql.lang import Query
from ldql.lang import QueryUnion
from ldql.lang import SeedUris
from ldql.lang import SeedVar
from ldql.lang import Star
from ldql.lang import Test
from ldql.rdf import Literal
from ldql.rdf import LinkPattern
from ldql.rdf import Marker
from ldql.rdf import PatternTerm
from ldql.rdf import Uri

# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<WS>[ \t\r\n]+)
  | (?P<COMMENT>\#[^\n]*)
  | (?P<OPEN><<)
  | (?P<IRI><[^<>"\s{}|^`\\]*>)
  | (?P<CLOSE>>>)
  | (?P<VAR>\?[A-Za-z_][A-Za-z0-9_]*)
  | (?P<STRING>"(?:[^"\\\n]|\\.)*")
  | (?P<NAME>[A-Za-z][A-Za-z0-9_]*)
  | (?P<PUNCT>&&|\|\||!=|[=!^{}()\[\],./|*+_:])
    """,
    re.VERBOSE,
)

_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


class Lexer:
    """Splits surface text into tokens, tracking 1-based line and column."""

    def __init__(self, text: str, source: str = "query"):
        self.text = text
        self.source = source

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        pos, line, line_start = 0, 1, 0
        while pos < len(self.text):
            m = _TOKEN_RE.match(self.text, pos)
            if m is None:
                raise ParseError(
                    f"unexpected character {self.text[pos]!r}",
                    line,
                    pos - line_start + 1,
                    self.source,
                )
            kind = m.lastgroup or ""
            if kind not in ("WS", "COMMENT"):
                out.append(Token(kind, m.group(), line, pos - line_start + 1))
            newlines = m.group().count("\n")
            if newlines:
                line += newlines
                line_start = m.start() + m.group().rindex("\n") + 1
            pos = m.end()
        out.append(Token("EOF", "", line, pos - line_start + 1))
        return out


def _unquote(text: str) -> str:
    body = text[1:-1]
    return re.sub(r"\\(.)", lambda m: _ESCAPES.get(m.group(1), m.group(1)), body)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class TokenStream:
    """Cursor over a token list with the error reporting every surface parser shares."""

    def __init__(self, text: str, source: str = "query"):
        self.source = source
        self._tokens = Lexer(text, source).tokens()
        self._pos = 0

    def peek(self, offset: int = 0) -> Token:
        return self._tokens[min(self._pos + offset, len(self._tokens) - 1)]

    def advance(self) -> Token:
        tok = self.peek()
        if tok.kind != "EOF":
            self._pos += 1
        return tok

    def at(self, text: str, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return tok.kind in ("PUNCT", "NAME", "OPEN", "CLOSE") and tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> Token:
        if self.peek().kind != kind:
            self.error(f"expected {what}")
        return self.advance()

    def expect_end(self) -> None:
        if self.peek().kind != "EOF":
            self.error("unexpected trailing input")

    def error(self, message: str, tok: Token | None = None) -> Any:
        tok = tok or self.peek()
        found = "end of input" if tok.kind == "EOF" else repr(tok.text)
        raise ParseError(f"{message}, found {found}", tok.line, tok.column, self.source)

    def iri(self) -> Uri:
        tok = self.expect_kind("IRI", "an IRI")
        if len(tok.text) == 2:
            self.error("empty IRI", tok)
        return Uri(tok.text[1:-1])


class LdqlParser(TokenStream):
    """Recursive-descent parser for queries, LPEs, patterns and expressions."""

    def __init__(self, text: str, source: str = "query", allow_reserved: bool = False):
        super().__init__(text, source)
        self.allow_reserved = allow_reserved

    def var(self) -> Var:
        tok = self.expect_kind("VAR", "a variable")
        name = tok.text[1:]
        if not self.allow_reserved and RESERVED_VAR.fullmatch(name):
            self.error(f"variable ?{name} is in the reserved ?_gN namespace", tok)
        return Var(name)

    def literal(self) -> Literal:
        return Literal(_unquote(self.expect_kind("STRING", "a literal").text))

    # -- queries -------------------------------------------------------------

    def query(self) -> Query:
        tok = self.peek()
        if tok.kind == "OPEN":
            self.advance()
            lpe = self.lpe()
            self.expect(",")
            pattern = self.pattern()
            if self.peek().kind != "CLOSE":
                self.error("expected '>>'")
            self.advance()
            return Basic(lpe, pattern)
        if self.accept("SEED"):
            nxt = self.peek()
            if nxt.kind == "VAR":
                var = self.var()
                return SeedVar(var, self.query())
            if nxt.kind == "IRI":
                uri = self.iri()
                return SeedUris(frozenset({uri}), self.query())
            self.expect("{")
            uris = set()
            while not self.accept("}"):
                uris.add(self.iri())
            return SeedUris(frozenset(uris), self.query())
        if self.accept("PROJECT"):
            self.expect("{")
            variables = set()
            while not self.accept("}"):
                variables.add(self.var())
            self.expect("(")
            inner = self.query()
            self.expect(")")
            return Project(frozenset(variables), inner)
        if self.accept("("):
            result = self.query()
            op = None
            while self.peek().kind == "NAME" and self.peek().text in ("AND", "UNION"):
                tok = self.advance()
                if op is not None and tok.text != op:
                    self.error("AND and UNION cannot be mixed without parentheses", tok)
                op = tok.text
                right = self.query()
                result = And(result, right) if op == "AND" else QueryUnion(result, right)
            self.expect(")")
            return result
        return self.error("expected a query")

    # -- link path expressions ---------------------------------------------

    def lpe(self) -> Lpe:
        result = self._lpe_seq()
        while self.accept("|"):
            result = Alt(result, self._lpe_seq())
        return result

    def _lpe_seq(self) -> Lpe:
        result = self._lpe_post()
        while self.accept("/"):
            result = Concat(result, self._lpe_post())
        return result

    def _lpe_post(self) -> Lpe:
        result = self._lpe_atom()
        while self.accept("*"):
            result = Star(result)
        return result

    def _lpe_atom(self) -> Lpe:
        if self.accept("eps"):
            return EPS
        if self.at("{"):
            start = self.advance()
            terms = (self._lterm(), self._lterm(), self._lterm())
            self.expect("}")
            try:
                return Pattern(LinkPattern(*terms))
            except ValueError as exc:
                return self.error(str(exc), start)
        if self.accept("["):
            inner = self.lpe()
            self.expect("]")
            return Test(inner)
        if self.accept("("):
            if self.peek().kind == "VAR" and self.at(":", 1):
                var = self.var()
                self.expect(":")
                query = self.query()
                self.expect(")")
                return NavSub(var, query)
            inner = self.lpe()
            self.expect(")")
            return inner
        return self.error("expected an LPE")

    def _lterm(self) -> PatternTerm:
        if self.accept("+"):
            return Marker.CONTEXT
        if self.accept("_"):
            return Marker.WILDCARD
        if self.peek().kind == "STRING":
            return self.literal()
        return self.iri()

    # -- graph patterns ------------------------------------------------------

    def pattern(self) -> GraphPattern:
        if self.accept("{"):
            triples = []
            if not self.accept("}"):
                triples.append(self._triple_pattern())
                while self.accept("."):
                    if self.at("}"):
                        break
                    triples.append(self._triple_pattern())
                self.expect("}")
            return Bgp(tuple(triples))
        if self.accept("GRAPH"):
            graph: Uri | Var = self.var() if self.peek().kind == "VAR" else self.iri()
            return Graph(graph, self.pattern())
        if self.accept("("):
            result = self.pattern()
            while True:
                if self.accept("AND"):
                    result = Join(result, self.pattern())
                elif self.accept("OPT"):
                    result = LeftJoin(result, self.pattern())
                elif self.accept("UNION"):
                    result = PatternUnion(result, self.pattern())
                elif self.accept("FILTER"):
                    result = Filter(result, self.expr())
                elif self.accept("BIND"):
                    expr = self.expr()
                    self.expect("AS")
                    tok = self.peek()
                    var = self.var()
                    if var in pattern_vars(result):
                        self.error(f"BIND target {var.n3()} is already used in the pattern", tok)
                    result = Bind(result, expr, var)
                else:
                    break
            self.expect(")")
            return result
        return self.error("expected a graph pattern")

    def _triple_pattern(self) -> TriplePattern:
        return TriplePattern(self._slot(), self._slot(), self._slot())

    def _slot(self) -> PatternSlot:
        kind = self.peek().kind
        if kind == "VAR":
            return self.var()
        if kind == "STRING":
            return self.literal()
        if kind == "IRI":
            return self.iri()
        return self.error("expected a variable, IRI or literal")

    # -- expressions ---------------------------------------------------------

    def expr(self) -> Expr:
        result = self._conj()
        while self.accept("||"):
            result = OrExpr(result, self._conj())
        return result

    def _conj(self) -> Expr:
        result = self._unary()
        while self.accept("&&"):
            result = AndExpr(result, self._unary())
        return result

    def _unary(self) -> Expr:
        if self.accept("!"):
            return NotExpr(self._unary())
        left = self._prim()
        if self.accept("="):
            return Eq(left, self._prim())
        if self.accept("!="):
            return Neq(left, self._prim())
        return left

    def _prim(self) -> Expr:
        if self.accept("("):
            inner = self.expr()
            self.expect(")")
            return inner
        kind = self.peek().kind
        if kind == "VAR":
            return self.var()
        if kind == "STRING":
            return Const(self.literal())
        if kind == "IRI":
            return Const(self.iri())
        return self.error("expected an expression")


def _parse_whole(
    text: str, rule: Callable[[LdqlParser], Any], source: str, allow_reserved: bool
) -> Any:
    parser = LdqlParser(text, source, allow_reserved)
    result = rule(parser)
    parser.expect_end()
    return result


def parse_query(text: str, *, allow_reserved: bool = False) -> Query:
    """Parse LDQL query text; raises ParseError with the offending position."""
    return _parse_whole(text, LdqlParser.query, "query", allow_reserved)


def parse_lpe(text: str, *, allow_reserved: bool = False) -> Lpe:
    return _parse_whole(text, LdqlParser.lpe, "lpe", allow_reserved)


def parse_pattern(text: str, *, allow_reserved: bool = False) -> GraphPattern:
    return _parse_whole(text, LdqlParser.pattern, "pattern", allow_reserved)


def parse_expr(text: str, *, allow_reserved: bool = False) -> Expr:
    return _parse_whole(text, LdqlParser.expr, "expr", allow_reserved)


# ---------------------------------------------------------------------------
# Serializer
# ---------------------------------------------------------------------------

_ALT, _SEQ, _POST, _ATOM = 1, 2, 3, 4


def _lterm_text(t: PatternTerm) -> str:
    return t.n3()


def _lpe_text(l: Lpe, min_prec: int) -> str:
    if isinstance(l, Alt):
        text, prec = f"{_lpe_text(l.left, _ALT)} | {_lpe_text(l.right, _SEQ)}", _ALT
    elif isinstance(l, Concat):
        text, prec = f"{_lpe_text(l.left, _SEQ)} / {_lpe_text(l.right, _POST)}", _SEQ
    elif isinstance(l, Star):
        text, prec = f"{_lpe_text(l.inner, _POST)}*", _POST
    elif isinstance(l, Epsilon):
        return "eps"
    elif isinstance(l, Pattern):
        return "{" + " ".join(_lterm_text(t) for t in l.lp) + "}"
    elif isinstance(l, Test):
        return f"[ {_lpe_text(l.inner, _ALT)} ]"
    elif isinstance(l, NavSub):
        return f"({l.var.n3()} : {serialize_query(l.query)})"
    else:
        raise TypeError(f"not an LPE: {l!r}")
    return f"({text})" if prec < min_prec else text


def serialize_lpe(l: Lpe) -> str:
    return _lpe_text(l, _ALT)


def serialize_expr(e: Expr) -> str:
    if isinstance(e, Var):
        return e.n3()
    if isinstance(e, Const):
        return e.term.n3()
    if isinstance(e, NotExpr):
        return f"(!{serialize_expr(e.inner)})"
    op = {Eq: "=", Neq: "!=", AndExpr: "&&", OrExpr: "||"}[type(e)]
    return f"({serialize_expr(e.left)} {op} {serialize_expr(e.right)})"


def serialize_pattern(p: GraphPattern) -> str:
    if isinstance(p, Bgp):
        if not p.triples:
            return "{ }"
        body = " . ".join(" ".join(t.n3() for t in tp) for tp in p.triples)
        return "{ " + body + " }"
    if isinstance(p, (Join, LeftJoin, PatternUnion)):
        op = {Join: "AND", LeftJoin: "OPT", PatternUnion: "UNION"}[type(p)]
        return f"({serialize_pattern(p.left)} {op} {serialize_pattern(p.right)})"
    if isinstance(p, Filter):
        return f"({serialize_pattern(p.pattern)} FILTER {serialize_expr(p.expr)})"
    if isinstance(p, Bind):
        return (
            f"({serialize_pattern(p.pattern)} BIND {serialize_expr(p.expr)} AS {p.var.n3()})"
        )
    if isinstance(p, Graph):
        return f"GRAPH {p.graph.n3()} {serialize_pattern(p.pattern)}"
    raise TypeError(f"not a graph pattern: {p!r}")


def serialize_query(q: Query) -> str:
    """Canonical text for *q*; :func:`parse_query` reads it back to an equal tree."""
    if isinstance(q, Basic):
        return f"<< {serialize_lpe(q.lpe)} , {serialize_pattern(q.pattern)} >>"
    if isinstance(q, SeedUris):
        uris = "".join(f"{u.n3()} " for u in sorted(q.uris))
        return f"SEED {{ {uris}}} {serialize_query(q.query)}"
    if isinstance(q, SeedVar):
        return f"SEED {q.var.n3()} {serialize_query(q.query)}"
    if isinstance(q, And):
        return f"({serialize_query(q.left)} AND {serialize_query(q.right)})"
    if isinstance(q, QueryUnion):
        return f"({serialize_query(q.left)} UNION {serialize_query(q.right)})"
    if isinstance(q, Project):
        names = "".join(f"{v.n3()} " for v in sorted(q.variables))
        return f"PROJECT {{ {names}}} ( {serialize_query(q.query)} )"
    raise TypeError(f"not an LDQL query: {q!r}")


# ---------------------------------------------------------------------------
# Structured form
# ---------------------------------------------------------------------------


def _term_dict(t: Any) -> Any:
    if isinstance(t, Var):
        return {"var": t.name}
    if isinstance(t, Marker):
        return t.value
    if isinstance(t, Uri):
        return {"iri": t.value}
    if isinstance(t, Literal):
        return {"literal": t.lexical}
    raise TypeError(f"not a term: {t!r}")


def expr_to_dict(e: Expr) -> dict[str, Any]:
    if isinstance(e, Var):
        return {"type": "var", "name": e.name}
    if isinstance(e, Const):
        return {"type": "const", "term": _term_dict(e.term)}
    if isinstance(e, NotExpr):
        return {"type": "not", "expr": expr_to_dict(e.inner)}
    kind = {Eq: "eq", Neq: "neq", AndExpr: "and", OrExpr: "or"}[type(e)]
    return {"type": kind, "left": expr_to_dict(e.left), "right": expr_to_dict(e.right)}


def pattern_to_dict(p: GraphPattern) -> dict[str, Any]:
    if isinstance(p, Bgp):
        return {"type": "bgp", "triples": [[_term_dict(t) for t in tp] for tp in p.triples]}
    if isinstance(p, (Join, LeftJoin, PatternUnion)):
        kind = {Join: "and", LeftJoin: "opt", PatternUnion: "union"}[type(p)]
        return {"type": kind, "left": pattern_to_dict(p.left), "right": pattern_to_dict(p.right)}
    if isinstance(p, Filter):
        return {
            "type": "filter",
            "pattern": pattern_to_dict(p.pattern),
            "expr": expr_to_dict(p.expr),
        }
    if isinstance(p, Bind):
        return {
            "type": "bind",
            "pattern": pattern_to_dict(p.pattern),
            "expr": expr_to_dict(p.expr),
            "var": p.var.name,
        }
    return {"type": "graph", "graph": _term_dict(p.graph), "pattern": pattern_to_dict(p.pattern)}


def lpe_to_dict(l: Lpe) -> dict[str, Any]:
    if isinstance(l, Epsilon):
        return {"type": "eps"}
    if isinstance(l, Pattern):
        return {"type": "link_pattern", "terms": [_term_dict(t) for t in l.lp]}
    if isinstance(l, (Concat, Alt)):
        kind = "concat" if isinstance(l, Concat) else "alt"
        return {"type": kind, "left": lpe_to_dict(l.left), "right": lpe_to_dict(l.right)}
    if isinstance(l, (Star, Test)):
        kind = "star" if isinstance(l, Star) else "test"
        return {"type": kind, "inner": lpe_to_dict(l.inner)}
    return {"type": "navsub", "var": l.var.name, "query": query_to_dict(l.query)}


def query_to_dict(q: Query) -> dict[str, Any]:
    """Machine-readable AST of *q*, suitable for JSON output."""
    if isinstance(q, Basic):
        return {"type": "basic", "lpe": lpe_to_dict(q.lpe), "pattern": pattern_to_dict(q.pattern)}
    if isinstance(q, SeedUris):
        return {
            "type": "seed_uris",
            "uris": [u.value for u in sorted(q.uris)],
            "query": query_to_dict(q.query),
        }
    if isinstance(q, SeedVar):
        return {"type": "seed_var", "var": q.var.name, "query": query_to_dict(q.query)}
    if isinstance(q, (And, QueryUnion)):
        kind = "and" if isinstance(q, And) else "union"
        return {"type": kind, "left": query_to_dict(q.left), "right": query_to_dict(q.right)}
    return {
        "type": "project",
        "variables": sorted(v.name for v in q.variables),
        "query": query_to_dict(q.query),
    }
