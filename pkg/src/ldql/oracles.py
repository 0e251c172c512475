"""Reference evaluators for property paths, NautiLOD and reachability-based SPARQL.

Layer: Oracles
May only import from: .errors, .rdf, .algebra, .formalisms, stdlib

Each evaluator follows the defining clauses of its formalism by brute force
over a materialised web. None of them use the LDQL evaluator; the
translator tests compare the two.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from ldql.algebra import GraphPattern
from ldql.algebra import PatternSlot
from ldql.algebra import Solution
from ldql.algebra import TriplePattern
from ldql.algebra import Var
from ldql.algebra import eval_pattern
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
from ldql.rdf import RdfDataset
from ldql.rdf import Term
from ldql.rdf import Triple
from ldql.rdf import Uri
from ldql.rdf import WebOfLinkedData
from ldql.rdf import link_graph

Pair = tuple[Term, Term]

# ---------------------------------------------------------------------------
# Context-based property paths
# ---------------------------------------------------------------------------


class ContextSelector:
    """C(a): the triples of adoc(a) with subject a, or nothing when a is not in dom(adoc)."""

    def __init__(self, web: WebOfLinkedData):
        self.web = web
        self._by_uri = {
            u: frozenset(t for t in web.data_of(u) if t.s == u) for u in web.dom()
        }

    def __call__(self, term: Term) -> frozenset[Triple]:
        if isinstance(term, Uri):
            return self._by_uri.get(term, frozenset())
        return frozenset()

    def authoritative(self) -> frozenset[Triple]:
        """Every triple some context selects."""
        return frozenset().union(*self._by_uri.values())


def _compose(left: frozenset[Pair], right: frozenset[Pair]) -> frozenset[Pair]:
    successors: dict[Term, set[Term]] = {}
    for a, b in right:
        successors.setdefault(a, set()).add(b)
    return frozenset((a, c) for a, b in left for c in successors.get(b, ()))


class _PathRelation:
    """The pairs of terms a property path connects on one web.

    A PP pattern ``(alpha, pp, beta)`` has a solution exactly for the pairs
    ``(mu[alpha], mu[beta])`` in this relation, so the pattern clauses only
    differ in how the endpoints are bound.
    """

    def __init__(self, web: WebOfLinkedData):
        self.context = ContextSelector(web)
        self.terms = web.terms()
        self._authoritative = self.context.authoritative()

    def __call__(self, pp: PpExpr) -> frozenset[Pair]:
        if isinstance(pp, Pred):
            return frozenset((t.s, t.o) for t in self._authoritative if t.p == pp.uri)
        if isinstance(pp, NegSet):
            excluded = set(pp.uris)
            return frozenset((t.s, t.o) for t in self._authoritative if t.p not in excluded)
        if isinstance(pp, PpSeq):
            return _compose(self(pp.left), self(pp.right))
        if isinstance(pp, PpAlt):
            return self(pp.left) | self(pp.right)
        if isinstance(pp, PpStar):
            step = self(pp.inner)
            closure = set(step)
            power = step
            # a shortest path never repeats a term
            for _ in range(len(self.terms)):
                power = _compose(power, step)
                if power <= closure:
                    break
                closure |= power
            closure.update((t, t) for t in self.terms)
            return frozenset(closure)
        raise TypeError(f"not a property path: {pp!r}")


def _bind(slot: PatternSlot, term: Term, m: dict[Var, Term]) -> bool:
    if isinstance(slot, Var):
        current = m.setdefault(slot, term)
        return current == term
    return slot == term


def eval_pp_ctxt(p: PpPattern, w: WebOfLinkedData) -> frozenset[Solution]:
    """Context-based evaluation of a property-path pattern, with set semantics."""
    out = set()
    for a, b in _PathRelation(w)(p.pp):
        m: dict[Var, Term] = {}
        if _bind(p.alpha, a, m) and _bind(p.beta, b, m):
            out.add(Solution(m))
    return frozenset(out)


# ---------------------------------------------------------------------------
# NautiLOD
# ---------------------------------------------------------------------------


class _NautilodEvaluator:
    def __init__(self, web: WebOfLinkedData):
        self.web = web
        self.dom = web.dom()

    def __call__(self, n: NautilodExpr, u: Uri) -> frozenset[Term]:
        data = self.web.data_of(u)
        if isinstance(n, Fwd):
            return frozenset(t.o for t in data if t.s == u and t.p == n.pred)
        if isinstance(n, Bwd):
            return frozenset(t.s for t in data if t.o == u and t.p == n.pred)
        if isinstance(n, AnyFwd):
            return frozenset(t.o for t in data if t.s == u)
        if isinstance(n, NlSeq):
            return frozenset(
                v for mid in self(n.left, u) if mid in self.dom for v in self(n.right, mid)
            )
        if isinstance(n, NlAlt):
            return self(n.left, u) | self(n.right, u)
        if isinstance(n, NlStar):
            reached: set[Term] = {u}
            frontier: list[Term] = [u]
            while frontier:
                current = frontier.pop()
                if current not in self.dom:
                    continue
                for v in self(n.inner, current):  # type: ignore[arg-type]
                    if v not in reached:
                        reached.add(v)
                        frontier.append(v)
            return frozenset(reached)
        if isinstance(n, AskTest):
            return frozenset(
                v
                for v in self(n.inner, u)
                if v in self.dom and self._ask(n.pattern, v)  # type: ignore[arg-type]
            )
        raise TypeError(f"not a NautiLOD expression: {n!r}")

    def _ask(self, pattern: GraphPattern, v: Uri) -> bool:
        graph = self.web.data_of(v)
        return bool(eval_pattern(pattern, graph, RdfDataset.of_graph(graph)))


def eval_nautilod(n: NautilodExpr, w: WebOfLinkedData, u: Uri) -> frozenset[Term]:
    """The terms *n* reaches from *u*; *u* must be in dom(adoc)."""
    if u not in w.dom():
        raise ValueError(f"{u.n3()} is not in dom(adoc)")
    return _NautilodEvaluator(w)(n, u)


# ---------------------------------------------------------------------------
# Reachability-based SPARQL
# ---------------------------------------------------------------------------


def _instance_of(tp: TriplePattern, t: Triple) -> bool:
    m: dict[Var, Term] = {}
    return all(_bind(slot, term, m) for slot, term in zip(tp, t))


def criterion_holds(c: ReachCriterion, t: Triple, u: Uri, p: GraphPattern) -> bool:
    """Whether *c* follows the data link ``(t, u)`` for pattern *p*."""
    if c is ReachCriterion.ALL:
        return True
    if c is ReachCriterion.NONE:
        return False
    return any(_instance_of(tp, t) for tp in triple_patterns(p))


@dataclass(frozen=True)
class ReachableDocSet:
    docs: frozenset[str]
    criterion: ReachCriterion
    seeds: frozenset[Uri]
    pattern: GraphPattern

    def graph(self, w: WebOfLinkedData) -> frozenset[Triple]:
        """The union of the data of every reachable document."""
        return frozenset().union(*(w.docs[d].data for d in self.docs))


def reachable_docs(
    c: ReachCriterion, s: Iterable[Uri], p: GraphPattern, w: WebOfLinkedData
) -> ReachableDocSet:
    """The (c, S, P)-reachable documents of *w*, as a least fixpoint."""
    seeds = frozenset(s)
    reached = {w.adoc[u] for u in seeds if u in w.adoc}
    edges = [e for e in link_graph(w) if criterion_holds(c, e.triple, e.via, p)]
    changed = True
    while changed:
        changed = False
        for e in edges:
            if e.src in reached and e.tgt not in reached:
                reached.add(e.tgt)
                changed = True
    return ReachableDocSet(frozenset(reached), c, seeds, p)


def eval_reach(
    p: GraphPattern, c: ReachCriterion, s: Iterable[Uri], w: WebOfLinkedData
) -> frozenset[Solution]:
    """S-based evaluation of *p* under c-semantics."""
    graph = reachable_docs(c, s, p, w).graph(w)
    return eval_pattern(p, graph, RdfDataset.of_graph(graph))
