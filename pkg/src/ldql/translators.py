"""Translations of property paths, NautiLOD and reachability-based SPARQL into LDQL.

Layer: Translation
May only import from: .errors, .rdf, .algebra, .lang, .formalisms, stdlib

Every translation is constructive and equivalence-preserving:

* ``translate_pp(p)`` evaluated with no seed URIs gives the context-based
  evaluation of the PP pattern ``p``;
* ``translate_nautilod(n)`` seeded with ``{u}`` binds ``?x`` to exactly the
  terms ``n`` reaches from ``u``;
* ``translate_reachability(c, p)`` seeded with ``S`` gives the S-based
  evaluation of ``p`` under c-semantics, for patterns without GRAPH.

Generated variables come from the reserved ``?_gN`` namespace.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

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
from ldql.algebra import Neq
from ldql.algebra import PatternSlot
from ldql.algebra import PatternUnion
from ldql.algebra import TriplePattern
from ldql.algebra import Var
from ldql.algebra import pattern_vars
from ldql.algebra import rename_pattern
from ldql.algebra import triple_patterns
from ldql.formalisms import AnyFwd
from ldql.formalisms import AskTest
from ldql.formalisms import Bwd
from ldql.formalisms import Fwd
from ldql.formalisms import NautilodExpr
from ldql.formalisms import NegSet
from ldql.formalisms import NlAlt
from ldql.formalisms import NlSeq
from ldql.formalisms import NlStar
from ldql.formalisms import PpAlt
from ldql.formalisms import PpExpr
from ldql.formalisms import PpPattern
from ldql.formalisms import PpSeq
from ldql.formalisms import PpStar
from ldql.formalisms import Pred
from ldql.formalisms import ReachCriterion
from ldql.formalisms import ask_patterns
from ldql.lang import EPS
from ldql.lang import And
from ldql.lang import Basic
from ldql.lang import Concat
from ldql.lang import FreshVars
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
from ldql.lang import alt_all
from ldql.lang import union_all
from ldql.rdf import Literal
from ldql.rdf import LinkPattern
from ldql.rdf import Marker


def _conjunction(exprs: Sequence[Expr]) -> Expr:
    out = exprs[0]
    for e in exprs[1:]:
        out = AndExpr(out, e)
    return out


def _vars(*slots: PatternSlot) -> frozenset[Var]:
    return frozenset(s for s in slots if isinstance(s, Var))


# ---------------------------------------------------------------------------
# Property paths
# ---------------------------------------------------------------------------


class _PpTranslator:
    def __init__(self, fresh: FreshVars):
        self.fresh = fresh

    def query(self, pp: PpExpr, alpha: PatternSlot, beta: PatternSlot) -> Query:
        if isinstance(pp, Pred):
            return self._step(alpha, Bgp((TriplePattern(alpha, pp.uri, beta),)))
        if isinstance(pp, NegSet):
            p = self.fresh()
            excluded = _conjunction([Neq(p, Const(u)) for u in pp.uris])
            return self._step(alpha, Filter(Bgp((TriplePattern(alpha, p, beta),)), excluded))
        if isinstance(pp, PpSeq):
            z = self.fresh()
            return Project(
                _vars(alpha, beta),
                And(self.query(pp.left, alpha, z), self.query(pp.right, z, beta)),
            )
        if isinstance(pp, PpAlt):
            return QueryUnion(self.query(pp.left, alpha, beta), self.query(pp.right, alpha, beta))
        if isinstance(pp, PpStar):
            return self._star(pp.inner, alpha, beta)
        raise TypeError(f"not a property path: {pp!r}")

    def _step(self, alpha: PatternSlot, pattern: GraphPattern) -> Query:
        """One navigation step read from the authoritative document of *alpha*."""
        if isinstance(alpha, Literal):
            return self._unsatisfiable(alpha)
        basic = Basic(EPS, pattern)
        if isinstance(alpha, Var):
            return SeedVar(alpha, basic)
        return SeedUris(frozenset({alpha}), basic)

    def _unsatisfiable(self, lit: Literal) -> Query:
        a, b = self.fresh(), self.fresh()
        twins = Join(Bind(Bgp(), Const(lit), a), Bind(Bgp(), Const(lit), b))
        return Basic(EPS, Filter(twins, Neq(a, b)))

    def _occurs(self, t: Var) -> GraphPattern:
        """Binds *t* to every term of the active graph."""
        f = self.fresh
        return PatternUnion(
            PatternUnion(
                Bgp((TriplePattern(t, f(), f()),)),
                Bgp((TriplePattern(f(), t, f()),)),
            ),
            Bgp((TriplePattern(f(), f(), t),)),
        )

    def _identity(self, alpha: PatternSlot, beta: PatternSlot) -> Query:
        """Zero steps: alpha and beta are the same term of the web."""
        if isinstance(alpha, Var) and isinstance(beta, Var) and alpha != beta:
            pattern: GraphPattern = Filter(
                Join(self._occurs(alpha), self._occurs(beta)), Eq(alpha, beta)
            )
        else:
            t = alpha if isinstance(alpha, Var) else beta if isinstance(beta, Var) else self.fresh()
            pattern = self._occurs(t)
            constants = [Eq(t, Const(c)) for c in (alpha, beta) if not isinstance(c, Var)]
            if constants:
                pattern = Filter(pattern, _conjunction(constants))
        return Project(_vars(alpha, beta), SeedVar(self.fresh(), Basic(EPS, pattern)))

    def _star(self, inner: PpExpr, alpha: PatternSlot, beta: PatternSlot) -> Query:
        identity = self._identity(alpha, beta)
        if isinstance(alpha, Literal):
            return identity
        v, u, z = self.fresh(), self.fresh(), self.fresh()
        step = NavSub(v, And(Basic(EPS, Graph(u, Bgp())), self.query(inner, u, v)))
        reach = Basic(Star(step), Graph(z, Bgp()))
        start: Query = (
            SeedVar(alpha, reach) if isinstance(alpha, Var) else SeedUris(frozenset({alpha}), reach)
        )
        more = Project(_vars(alpha, beta), And(start, self.query(inner, z, beta)))
        return QueryUnion(identity, more)


def translate_pp(p: PpPattern) -> Query:
    """An LDQL query equivalent to *p* when evaluated with no seed URIs."""
    return _PpTranslator(FreshVars(p.variables())).query(p.pp, p.alpha, p.beta)


# ---------------------------------------------------------------------------
# NautiLOD
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _LastStep:
    """``prefix`` followed by one final step.

    ``kind`` is ``"base"`` (``last`` is a single navigation step), ``"ask"``
    (``pattern`` must hold at the end of ``prefix``) or ``"dom"`` (the end of
    ``prefix`` must be in dom(adoc)). A missing prefix starts and ends at
    the context URI.
    """

    prefix: NautilodExpr | None
    kind: str
    last: NautilodExpr | None = None
    pattern: GraphPattern | None = None

    def after(self, head: NautilodExpr) -> _LastStep:
        prefix = head if self.prefix is None else NlSeq(head, self.prefix)
        return _LastStep(prefix, self.kind, self.last, self.pattern)


def last_steps(n: NautilodExpr) -> list[_LastStep]:
    """Split *n* into a union of prefixes each followed by one final step."""
    if isinstance(n, (Fwd, Bwd, AnyFwd)):
        return [_LastStep(None, "base", n)]
    if isinstance(n, AskTest):
        return [_LastStep(n.inner, "ask", pattern=n.pattern)]
    if isinstance(n, NlAlt):
        return last_steps(n.left) + last_steps(n.right)
    if isinstance(n, NlSeq):
        return [step.after(n.left) for step in last_steps(n.right)]
    if isinstance(n, NlStar):
        return [_LastStep(None, "dom")] + [step.after(n) for step in last_steps(n.inner)]
    raise TypeError(f"not a NautiLOD expression: {n!r}")


class _NautilodTranslator:
    def __init__(self, fresh: FreshVars, var: Var):
        self.fresh = fresh
        self.var = var

    def lpe(self, n: NautilodExpr) -> Lpe:
        if isinstance(n, Fwd):
            return Pattern(LinkPattern(Marker.CONTEXT, n.pred, Marker.WILDCARD))
        if isinstance(n, Bwd):
            return Pattern(LinkPattern(Marker.WILDCARD, n.pred, Marker.CONTEXT))
        if isinstance(n, AnyFwd):
            x, u, p = self.fresh(), self.fresh(), self.fresh()
            return NavSub(x, Basic(EPS, Graph(u, Bgp((TriplePattern(u, p, x),)))))
        if isinstance(n, NlSeq):
            return Concat(self.lpe(n.left), self.lpe(n.right))
        if isinstance(n, NlAlt):
            return alt_all([self.lpe(n.left), self.lpe(n.right)])
        if isinstance(n, NlStar):
            return Star(self.lpe(n.inner))
        if isinstance(n, AskTest):
            g = self.fresh()
            return Concat(self.lpe(n.inner), Test(NavSub(g, Basic(EPS, Graph(g, n.pattern)))))
        raise TypeError(f"not a NautiLOD expression: {n!r}")

    def final(self, step: _LastStep) -> GraphPattern:
        x = self.var
        if step.kind == "dom":
            return Graph(x, Bgp())
        if step.kind == "ask":
            assert step.pattern is not None
            pattern = step.pattern
            if x in pattern_vars(pattern):
                pattern = rename_pattern(pattern, {x: self.fresh()})
            return Graph(x, pattern)
        u = self.fresh()
        if isinstance(step.last, Fwd):
            return Graph(u, Bgp((TriplePattern(u, step.last.pred, x),)))
        if isinstance(step.last, Bwd):
            return Graph(u, Bgp((TriplePattern(x, step.last.pred, u),)))
        return Graph(u, Bgp((TriplePattern(u, self.fresh(), x),)))

    def query(self, n: NautilodExpr) -> Query:
        branches = [
            Basic(EPS if step.prefix is None else self.lpe(step.prefix), self.final(step))
            for step in last_steps(n)
        ]
        return Project(frozenset({self.var}), union_all(branches))


def _nautilod_fresh(n: NautilodExpr, var: Var) -> FreshVars:
    avoid = {var}
    for pattern in ask_patterns(n):
        avoid.update(pattern_vars(pattern))
    return FreshVars(avoid)


def nautilod_lpe(n: NautilodExpr) -> Lpe:
    """The LPE that follows *n* between URIs in dom(adoc)."""
    return _NautilodTranslator(_nautilod_fresh(n, Var("x")), Var("x")).lpe(n)


def translate_nautilod(n: NautilodExpr, var: Var = Var("x")) -> Query:
    """An LDQL query whose only free variable *var* ranges over the terms *n* reaches."""
    return _NautilodTranslator(_nautilod_fresh(n, var), var).query(n)


# ---------------------------------------------------------------------------
# Reachability-based SPARQL
# ---------------------------------------------------------------------------


def _match_arm(tp: TriplePattern, positions: tuple[Var, Var, Var]) -> Query:
    """``<< eps , P >>`` whose solutions bind positions to the triples matching *tp*."""
    checks: list[Expr] = []
    slots = list(tp)
    for i, slot in enumerate(slots):
        if isinstance(slot, Var):
            first = slots.index(slot)
            if first < i:
                checks.append(Eq(positions[first], positions[i]))
        else:
            checks.append(Eq(positions[i], Const(slot)))
    pattern: GraphPattern = Bgp((TriplePattern(*positions),))
    if checks:
        pattern = Filter(pattern, _conjunction(checks))
    return Basic(EPS, pattern)


def reach_lpe(c: ReachCriterion, p: GraphPattern) -> Lpe:
    """The LPE selecting the documents that c-semantics reaches for *p*."""
    if c is ReachCriterion.NONE:
        return EPS
    if c is ReachCriterion.ALL:
        return Star(Pattern(LinkPattern(Marker.WILDCARD, Marker.WILDCARD, Marker.WILDCARD)))
    fresh = FreshVars(pattern_vars(p))
    positions = (fresh(), fresh(), fresh())
    arms: list[Lpe] = []
    for tp in dict.fromkeys(triple_patterns(p)):
        arm = _match_arm(tp, positions)
        arms.extend(NavSub(v, arm) for v in positions)
    return Star(alt_all(arms)) if arms else EPS


def translate_reachability(c: ReachCriterion, p: GraphPattern) -> Query:
    """``<< lpe^c , p >>``."""
    return Basic(reach_lpe(c, p), p)


__all__ = [
    "last_steps",
    "nautilod_lpe",
    "reach_lpe",
    "translate_nautilod",
    "translate_pp",
    "translate_reachability",
]
