"""Abstract syntax and surface syntax of the formalisms LDQL is compared with.

Layer: Formalisms
May only import from: .errors, .rdf, .algebra, .syntax, stdlib

Three formalisms are covered:

* property-path patterns ``alpha pp beta`` evaluated under context-based
  semantics;
* NautiLOD expressions without actions;
* SPARQL graph patterns under reachability-based semantics, identified by
  a :class:`ReachCriterion`.

Surface syntax (``#`` comments and whitespace as in LDQL)::

    pp_pattern := endpoint pp endpoint
    endpoint   := var | iri | literal
    pp         := pp_seq ("|" pp_seq)*
    pp_seq     := pp_post ("/" pp_post)*
    pp_post    := pp_atom "*"*
    pp_atom    := iri | "!" "(" iri ("|" iri)* ")" | "!" iri | "(" pp ")"

    nautilod   := nl_seq ("|" nl_seq)*
    nl_seq     := nl_post ("/" nl_post)*
    nl_post    := nl_atom ("*" | "[" "ASK" pattern "]")*
    nl_atom    := iri | iri "^" | "<>" | "(" nautilod ")"

``<>`` is the forward wildcard step. ``pattern`` is the LDQL graph pattern
syntax.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any
from typing import Union

from ldql.algebra import GraphPattern
from ldql.algebra import PatternSlot
from ldql.algebra import Var
from ldql.rdf import Uri
from ldql.syntax import LdqlParser
from ldql.syntax import serialize_pattern

# ---------------------------------------------------------------------------
# Property paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Pred:
    uri: Uri


@dataclass(frozen=True)
class NegSet:
    uris: tuple[Uri, ...]

    def __post_init__(self) -> None:
        if not self.uris:
            raise ValueError("a negated property set needs at least one URI")


@dataclass(frozen=True)
class PpSeq:
    left: PpExpr
    right: PpExpr


@dataclass(frozen=True)
class PpAlt:
    left: PpExpr
    right: PpExpr


@dataclass(frozen=True)
class PpStar:
    inner: PpExpr


PpExpr = Union[Pred, NegSet, PpSeq, PpAlt, PpStar]


@dataclass(frozen=True)
class PpPattern:
    alpha: PatternSlot
    pp: PpExpr
    beta: PatternSlot

    def variables(self) -> frozenset[Var]:
        return frozenset(t for t in (self.alpha, self.beta) if isinstance(t, Var))


# ---------------------------------------------------------------------------
# NautiLOD
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Fwd:
    pred: Uri


@dataclass(frozen=True)
class Bwd:
    pred: Uri


@dataclass(frozen=True)
class AnyFwd:
    pass


@dataclass(frozen=True)
class NlSeq:
    left: NautilodExpr
    right: NautilodExpr


@dataclass(frozen=True)
class NlAlt:
    left: NautilodExpr
    right: NautilodExpr


@dataclass(frozen=True)
class NlStar:
    inner: NautilodExpr


@dataclass(frozen=True)
class AskTest:
    inner: NautilodExpr
    pattern: GraphPattern


NautilodExpr = Union[Fwd, Bwd, AnyFwd, NlSeq, NlAlt, NlStar, AskTest]


def ask_patterns(n: NautilodExpr) -> list[GraphPattern]:
    """Every ASK pattern in *n*, outermost first."""
    if isinstance(n, AskTest):
        return [n.pattern, *ask_patterns(n.inner)]
    if isinstance(n, (NlSeq, NlAlt)):
        return ask_patterns(n.left) + ask_patterns(n.right)
    if isinstance(n, NlStar):
        return ask_patterns(n.inner)
    return []


# ---------------------------------------------------------------------------
# Reachability criteria
# ---------------------------------------------------------------------------


class ReachCriterion(str, enum.Enum):
    ALL = "all"
    NONE = "none"
    MATCH = "match"


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


class FormalismParser(LdqlParser):
    """Adds property-path and NautiLOD rules to the LDQL parser."""

    # -- property paths ------------------------------------------------------

    def endpoint(self) -> PatternSlot:
        kind = self.peek().kind
        if kind == "VAR":
            return self.var()
        if kind == "STRING":
            return self.literal()
        return self.iri()

    def pp_pattern(self) -> PpPattern:
        alpha = self.endpoint()
        pp = self.pp()
        return PpPattern(alpha, pp, self.endpoint())

    def pp(self) -> PpExpr:
        result = self._pp_seq()
        while self.accept("|"):
            result = PpAlt(result, self._pp_seq())
        return result

    def _pp_seq(self) -> PpExpr:
        result = self._pp_post()
        while self.accept("/"):
            result = PpSeq(result, self._pp_post())
        return result

    def _pp_post(self) -> PpExpr:
        result = self._pp_atom()
        while self.accept("*"):
            result = PpStar(result)
        return result

    def _pp_atom(self) -> PpExpr:
        if self.accept("!"):
            if not self.accept("("):
                return NegSet((self.iri(),))
            uris = [self.iri()]
            while self.accept("|"):
                uris.append(self.iri())
            self.expect(")")
            return NegSet(tuple(uris))
        if self.accept("("):
            inner = self.pp()
            self.expect(")")
            return inner
        return Pred(self.iri())

    # -- NautiLOD ------------------------------------------------------------

    def nautilod(self) -> NautilodExpr:
        result = self._nl_seq()
        while self.accept("|"):
            result = NlAlt(result, self._nl_seq())
        return result

    def _nl_seq(self) -> NautilodExpr:
        result = self._nl_post()
        while self.accept("/"):
            result = NlSeq(result, self._nl_post())
        return result

    def _nl_post(self) -> NautilodExpr:
        result = self._nl_atom()
        while True:
            if self.accept("*"):
                result = NlStar(result)
            elif self.accept("["):
                self.expect("ASK")
                pattern = self.pattern()
                self.expect("]")
                result = AskTest(result, pattern)
            else:
                return result

    def _nl_atom(self) -> NautilodExpr:
        if self.accept("("):
            inner = self.nautilod()
            self.expect(")")
            return inner
        tok = self.peek()
        if tok.kind == "IRI" and tok.text == "<>":
            self.advance()
            return AnyFwd()
        pred = self.iri()
        if self.accept("^"):
            return Bwd(pred)
        return Fwd(pred)


def _parse_whole(text: str, rule: Any, source: str) -> Any:
    parser = FormalismParser(text, source)
    result = rule(parser)
    parser.expect_end()
    return result


def parse_pp_pattern(text: str) -> PpPattern:
    """Parse ``alpha pp beta``; raises ParseError."""
    return _parse_whole(text, FormalismParser.pp_pattern, "pp")


def parse_pp(text: str) -> PpExpr:
    return _parse_whole(text, FormalismParser.pp, "pp")


def parse_nautilod(text: str) -> NautilodExpr:
    """Parse a NautiLOD expression; raises ParseError."""
    return _parse_whole(text, FormalismParser.nautilod, "nautilod")


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

_ALT, _SEQ, _POST = 1, 2, 3


def _pp_text(pp: PpExpr, min_prec: int) -> str:
    if isinstance(pp, Pred):
        return pp.uri.n3()
    if isinstance(pp, NegSet):
        return "!(" + " | ".join(u.n3() for u in pp.uris) + ")"
    if isinstance(pp, PpAlt):
        text, prec = f"{_pp_text(pp.left, _ALT)} | {_pp_text(pp.right, _SEQ)}", _ALT
    elif isinstance(pp, PpSeq):
        text, prec = f"{_pp_text(pp.left, _SEQ)} / {_pp_text(pp.right, _POST)}", _SEQ
    else:
        text, prec = f"{_pp_text(pp.inner, _POST)}*", _POST
    return f"({text})" if prec < min_prec else text


def serialize_pp(pp: PpExpr) -> str:
    return _pp_text(pp, _ALT)


def serialize_pp_pattern(p: PpPattern) -> str:
    return f"{p.alpha.n3()} {serialize_pp(p.pp)} {p.beta.n3()}"


def _nl_text(n: NautilodExpr, min_prec: int) -> str:
    if isinstance(n, Fwd):
        return n.pred.n3()
    if isinstance(n, Bwd):
        return f"{n.pred.n3()}^"
    if isinstance(n, AnyFwd):
        return "<>"
    if isinstance(n, NlAlt):
        text, prec = f"{_nl_text(n.left, _ALT)} | {_nl_text(n.right, _SEQ)}", _ALT
    elif isinstance(n, NlSeq):
        text, prec = f"{_nl_text(n.left, _SEQ)} / {_nl_text(n.right, _POST)}", _SEQ
    elif isinstance(n, NlStar):
        text, prec = f"{_nl_text(n.inner, _POST)}*", _POST
    else:
        text, prec = f"{_nl_text(n.inner, _POST)}[ASK {serialize_pattern(n.pattern)}]", _POST
    return f"({text})" if prec < min_prec else text


def serialize_nautilod(n: NautilodExpr) -> str:
    return _nl_text(n, _ALT)
