"""Reference evaluator for LDQL queries and LPEs over a materialised web.

Layer: Semantics
May only import from: .errors, .rdf, .algebra, .lang, .rewrite, .syntax, stdlib

This evaluator is the ground truth the executor and the translators are
tested against, so it either returns the exact result or refuses.

``SEED ?v q`` ranges over every URI. Only finitely many URIs can matter:
those in dom(adoc), in the web's data, or in the query (the *relevant*
URIs). Every other URI behaves like a fresh one, so a single probe with a
generic URI decides whether the unbounded part of the union contributes.
When it does the result is infinite and NonEnumerableResult is raised.

Inside a conjunction, operands are evaluated greedily. Values that every
mapping computed so far assigns to a variable restrict the operands that
follow, so ``(q1 AND (SEED ?v q2))`` only enumerates the URIs ``q1`` binds
``?v`` to. An operand evaluated under a restriction may return more than the
restricted answer but never less; the join removes the rest.
"""

from __future__ import annotations

from collections.abc import Iterable
from collections.abc import Mapping

from ldql.algebra import UNIT
from ldql.algebra import Solution
from ldql.algebra import Var
from ldql.algebra import eval_pattern
from ldql.algebra import join
from ldql.errors import NonEnumerableResult
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
from ldql.lang import and_all
from ldql.lang import lpe_uris
from ldql.lang import query_uris
from ldql.rdf import Term
from ldql.rdf import Uri
from ldql.rdf import WebOfLinkedData
from ldql.rdf import build_dataset
from ldql.rdf import matches
from ldql.rewrite import DEFAULT_NORMAL_FORM_LIMIT
from ldql.rewrite import and_items
from ldql.rewrite import rewrite_union_normal_form
from ldql.syntax import serialize_query

GENERIC_URI = "urn:x-ldql:generic"

Restriction = Mapping[Var, frozenset[Term]]

_NO_RESTRICTION: Restriction = {}


def _satisfies(m: Solution, restrict: Restriction) -> bool:
    return all(m[v] in values for v, values in restrict.items() if v in m)


def _tighten(restrict: Restriction, omega: frozenset[Solution]) -> Restriction:
    """*restrict* narrowed by the values every mapping of *omega* binds."""
    mappings = list(omega)
    shared = set(mappings[0]) if mappings else set()
    for m in mappings[1:]:
        shared.intersection_update(m)
    out = dict(restrict)
    for v in shared:
        values = frozenset(m[v] for m in mappings)
        out[v] = values & out[v] if v in out else values
    return out


class Evaluator:
    """Evaluates queries and LPEs over one web, memoising sub-results.

    Parameters
    ----------
    web:
        The web to evaluate over.
    normal_form_limit:
        Node budget for the UNION normal form rewrite used when a
        conjunction cannot be evaluated operand by operand.
    """

    def __init__(self, web: WebOfLinkedData, normal_form_limit: int = DEFAULT_NORMAL_FORM_LIMIT):
        self.web = web
        self.normal_form_limit = normal_form_limit
        self._dom = web.dom()
        self._relevant: set[Uri] = set(self._dom) | set(web.uris())
        self._generic: Uri | None = None
        self._query_memo: dict[tuple[int, frozenset[Uri]], frozenset[Solution]] = {}
        self._lpe_memo: dict[tuple[int, Uri], frozenset[Uri]] = {}
        # memo keys use id(); keep the keyed objects alive
        self._alive: dict[int, object] = {}

    # -- public ----------------------------------------------------------

    def eval_query(self, q: Query, seeds: Iterable[Uri]) -> frozenset[Solution]:
        self._note_uris(query_uris(q))
        return self._eval(q, frozenset(seeds), _NO_RESTRICTION)

    def eval_lpe(self, l: Lpe, ctx: Uri) -> frozenset[Uri]:
        self._note_uris(lpe_uris(l))
        return self._lpe(l, ctx)

    def relevant_uris(self) -> frozenset[Uri]:
        return frozenset(self._relevant)

    # -- helpers ---------------------------------------------------------

    def _note_uris(self, uris: Iterable[Uri]) -> None:
        before = len(self._relevant)
        self._relevant.update(uris)
        if len(self._relevant) != before:
            self._generic = None

    def _generic_uri(self) -> Uri:
        if self._generic is None:
            candidate, n = Uri(GENERIC_URI), 0
            while candidate in self._relevant:
                n += 1
                candidate = Uri(f"{GENERIC_URI}:{n}")
            self._generic = candidate
        return self._generic

    # -- queries ---------------------------------------------------------

    def _eval(self, q: Query, seeds: frozenset[Uri], restrict: Restriction) -> frozenset[Solution]:
        if restrict:
            return self._compute(q, seeds, restrict)
        key = (id(q), seeds)
        cached = self._query_memo.get(key)
        if cached is None:
            cached = self._compute(q, seeds, restrict)
            self._query_memo[key] = cached
            self._alive[id(q)] = q
        return cached

    def _compute(
        self, q: Query, seeds: frozenset[Uri], restrict: Restriction
    ) -> frozenset[Solution]:
        if isinstance(q, Basic):
            selected: set[Uri] = set()
            for u in seeds:
                selected.update(self._lpe(q.lpe, u))
            ds = build_dataset(self.web, selected)
            return eval_pattern(q.pattern, ds.default, ds)
        if isinstance(q, SeedUris):
            return self._eval(q.query, q.uris, restrict)
        if isinstance(q, SeedVar):
            return self._seed_var(q, restrict)
        if isinstance(q, QueryUnion):
            return self._eval(q.left, seeds, restrict) | self._eval(q.right, seeds, restrict)
        if isinstance(q, Project):
            inner = {v: s for v, s in restrict.items() if v in q.variables}
            return frozenset(m.project(q.variables) for m in self._eval(q.query, seeds, inner))
        if isinstance(q, And):
            return self._conjunction(and_items(q), seeds, restrict)
        raise TypeError(f"not an LDQL query: {q!r}")

    def _seed_var(self, q: SeedVar, restrict: Restriction) -> frozenset[Solution]:
        inner_restrict = {v: s for v, s in restrict.items() if v != q.var}
        if q.var in restrict:
            candidates: Iterable[Uri] = sorted(t for t in restrict[q.var] if isinstance(t, Uri))
        else:
            generic = self._generic_uri()
            binding = Solution({q.var: generic})
            for m in self._eval(q.query, frozenset({generic}), inner_restrict):
                if m.compatible(binding) and _satisfies(m, inner_restrict):
                    raise NonEnumerableResult(
                        q.var.name,
                        f"{serialize_query(q.query)} has a solution for every URI",
                    )
            candidates = sorted(self._relevant)
        out = set()
        for u in candidates:
            binding = Solution({q.var: u})
            for m in self._eval(q.query, frozenset({u}), inner_restrict):
                if m.compatible(binding):
                    out.add(m.merge(binding))
        return frozenset(out)

    def _conjunction(
        self, items: list[Query], seeds: frozenset[Uri], restrict: Restriction
    ) -> frozenset[Solution]:
        omega = UNIT
        pending = list(items)
        while pending:
            stuck: NonEnumerableResult | None = None
            for item in pending:
                try:
                    result = self._eval(item, seeds, restrict)
                except NonEnumerableResult as exc:
                    stuck = exc
                    continue
                pending.remove(item)
                omega = join(omega, result)
                if not omega:
                    return frozenset()
                restrict = _tighten(restrict, omega)
                stuck = None
                break
            if stuck is not None:
                rest = and_all(pending)
                normal = rewrite_union_normal_form(rest, self.normal_form_limit)
                if normal == rest:
                    raise stuck
                return join(omega, self._eval(normal, seeds, restrict))
        return omega

    # -- LPEs ------------------------------------------------------------

    def _lpe(self, l: Lpe, ctx: Uri) -> frozenset[Uri]:
        if ctx not in self._dom:
            return frozenset()
        key = (id(l), ctx)
        cached = self._lpe_memo.get(key)
        if cached is None:
            cached = self._compute_lpe(l, ctx)
            self._lpe_memo[key] = cached
            self._alive[id(l)] = l
        return cached

    def _compute_lpe(self, l: Lpe, ctx: Uri) -> frozenset[Uri]:
        if isinstance(l, Epsilon):
            return frozenset({ctx})
        if isinstance(l, Pattern):
            out = set()
            for triple in self.web.data_of(ctx):
                for u in triple.uris():
                    if u in self._dom and matches((triple, u), l.lp, ctx):
                        out.add(u)
            return frozenset(out)
        if isinstance(l, Concat):
            out = set()
            for mid in self._lpe(l.left, ctx):
                out.update(self._lpe(l.right, mid))
            return frozenset(out)
        if isinstance(l, Alt):
            return self._lpe(l.left, ctx) | self._lpe(l.right, ctx)
        if isinstance(l, Star):
            reached = {ctx}
            frontier = [ctx]
            while frontier:
                current = frontier.pop()
                for u in self._lpe(l.inner, current):
                    if u not in reached:
                        reached.add(u)
                        frontier.append(u)
            return frozenset(reached)
        if isinstance(l, Test):
            return frozenset({ctx}) if self._lpe(l.inner, ctx) else frozenset()
        if isinstance(l, NavSub):
            out = set()
            for m in self._eval(l.query, frozenset({ctx}), _NO_RESTRICTION):
                value = m.get(l.var)
                if isinstance(value, Uri):
                    out.add(value)
            return frozenset(out)
        raise TypeError(f"not an LPE: {l!r}")


def eval_query(
    q: Query,
    w: WebOfLinkedData,
    seeds: Iterable[Uri],
    *,
    normal_form_limit: int = DEFAULT_NORMAL_FORM_LIMIT,
) -> frozenset[Solution]:
    """The S-based evaluation of *q* over *w* with seed URIs *seeds*."""
    return Evaluator(w, normal_form_limit).eval_query(q, seeds)


def eval_lpe(l: Lpe, w: WebOfLinkedData, ctx: Uri) -> frozenset[Uri]:
    """The context-based evaluation of *l* over *w* at *ctx*."""
    return Evaluator(w).eval_lpe(l, ctx)
