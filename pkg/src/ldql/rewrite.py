"""Static rewrites of LDQL queries.

Layer: Language
May only import from: .errors, .rdf, .algebra, .lang, stdlib

Three rewrites live here:

* ``sbvars_query`` computes the strongly bound variables of a query;
* ``rewrite_union_normal_form`` pushes UNION to the top of a query using
  distributivity of AND, projection and both SEED forms over UNION;
* ``desugar`` rewrites an LPE so that it only uses ``eps``, ``(?v : q)`` and
  the Kleene star.

All three are pure functions over immutable trees.
"""

from __future__ import annotations

from collections.abc import Mapping

from ldql.algebra import Bgp
from ldql.algebra import Filter
from ldql.algebra import Graph
from ldql.algebra import Neq
from ldql.algebra import TriplePattern
from ldql.algebra import Var
from ldql.algebra import rename_pattern
from ldql.algebra import sbvars_pattern
from ldql.errors import NormalFormTooLarge
from ldql.lang import EPS
from ldql.lang import Alt
from ldql.lang import And
from ldql.lang import Basic
from ldql.lang import Concat
from ldql.lang import Epsilon
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
from ldql.lang import lpe_vars
from ldql.lang import query_size
from ldql.lang import query_vars
from ldql.lang import union_all
from ldql.rdf import Marker

DEFAULT_NORMAL_FORM_LIMIT = 100_000

# ---------------------------------------------------------------------------
# Strongly bound variables
# ---------------------------------------------------------------------------


def sbvars_query(q: Query) -> frozenset[Var]:
    """Variables bound in every solution of *q*, for every web and seed set."""
    if isinstance(q, Basic):
        return sbvars_pattern(q.pattern)
    if isinstance(q, And):
        return sbvars_query(q.left) | sbvars_query(q.right)
    if isinstance(q, QueryUnion):
        return sbvars_query(q.left) & sbvars_query(q.right)
    if isinstance(q, Project):
        return sbvars_query(q.query) & q.variables
    if isinstance(q, SeedUris):
        return sbvars_query(q.query)
    if isinstance(q, SeedVar):
        return sbvars_query(q.query) | {q.var}
    raise TypeError(f"not an LDQL query: {q!r}")


# ---------------------------------------------------------------------------
# Normal forms
# ---------------------------------------------------------------------------


def and_items(q: Query) -> list[Query]:
    """The operands of a (possibly nested) AND, left to right."""
    if isinstance(q, And):
        return and_items(q.left) + and_items(q.right)
    return [q]


def union_branches(q: Query) -> list[Query]:
    """The operands of a (possibly nested) UNION, left to right."""
    if isinstance(q, QueryUnion):
        return union_branches(q.left) + union_branches(q.right)
    return [q]


def _is_nf_item(q: Query) -> bool:
    if isinstance(q, Basic):
        return True
    if isinstance(q, (Project, SeedUris, SeedVar)):
        return is_union_free_normal_form(q.query)
    return False


def is_union_free_normal_form(q: Query) -> bool:
    return all(_is_nf_item(item) for item in and_items(q))


def is_union_normal_form(q: Query) -> bool:
    return all(is_union_free_normal_form(branch) for branch in union_branches(q))


def conjuncts(q: Query) -> list[Query]:
    """The UNION-free conjuncts of a query in UNION normal form."""
    if not is_union_normal_form(q):
        raise ValueError("query is not in UNION normal form")
    return union_branches(q)


class _Branches:
    """Union-free branches with their running node count."""

    def __init__(self, items: list[Query], size: int):
        self.items = items
        self.size = size

    @classmethod
    def single(cls, q: Query) -> _Branches:
        return cls([q], query_size(q))


def _check(limit: int, size: int) -> None:
    if size > limit:
        raise NormalFormTooLarge(limit, size)


def _normal_branches(q: Query, limit: int) -> _Branches:
    if isinstance(q, Basic):
        return _Branches.single(q)
    if isinstance(q, QueryUnion):
        left, right = _normal_branches(q.left, limit), _normal_branches(q.right, limit)
        _check(limit, left.size + right.size)
        return _Branches(left.items + right.items, left.size + right.size)
    if isinstance(q, And):
        left, right = _normal_branches(q.left, limit), _normal_branches(q.right, limit)
        n, m = len(left.items), len(right.items)
        size = m * left.size + n * right.size + n * m
        _check(limit, size)
        return _Branches([And(a, b) for a in left.items for b in right.items], size)
    inner = _normal_branches(q.query, limit)
    size = inner.size + len(inner.items)
    _check(limit, size)
    if isinstance(q, Project):
        return _Branches([Project(q.variables, b) for b in inner.items], size)
    if isinstance(q, SeedUris):
        return _Branches([SeedUris(q.uris, b) for b in inner.items], size)
    return _Branches([SeedVar(q.var, b) for b in inner.items], size)


def rewrite_union_normal_form(q: Query, limit: int = DEFAULT_NORMAL_FORM_LIMIT) -> Query:
    """An equivalent query in UNION normal form.

    Queries already in normal form are returned unchanged. Raises
    NormalFormTooLarge when the rewrite would exceed *limit* query nodes.
    """
    if is_union_normal_form(q):
        return q
    branches = _normal_branches(q, limit)
    return union_all(branches.items)


# ---------------------------------------------------------------------------
# Desugaring
# ---------------------------------------------------------------------------


def _rename_query(q: Query, renaming: Mapping[Var, Var]) -> Query:
    """Rename variables at *q*'s own scope; nested ``(?v : q)`` scopes are untouched."""

    def var(v: Var) -> Var:
        return renaming.get(v, v)

    if isinstance(q, Basic):
        return Basic(q.lpe, rename_pattern(q.pattern, renaming))
    if isinstance(q, And):
        return And(_rename_query(q.left, renaming), _rename_query(q.right, renaming))
    if isinstance(q, QueryUnion):
        return QueryUnion(_rename_query(q.left, renaming), _rename_query(q.right, renaming))
    if isinstance(q, Project):
        return Project(frozenset(var(v) for v in q.variables), _rename_query(q.query, renaming))
    if isinstance(q, SeedUris):
        return SeedUris(q.uris, _rename_query(q.query, renaming))
    return SeedVar(var(q.var), _rename_query(q.query, renaming))


def _graph_of(v: Var) -> Graph:
    return Graph(v, Bgp())


class _Desugarer:
    def __init__(self, fresh: FreshVars):
        self.fresh = fresh

    def lpe(self, l: Lpe) -> Lpe:
        if isinstance(l, Epsilon):
            return l
        if isinstance(l, Star):
            return Star(self.lpe(l.inner))
        if isinstance(l, NavSub):
            return NavSub(l.var, self.query(l.query))
        v = self.fresh()
        return NavSub(v, self.out(l, v))

    def query(self, q: Query) -> Query:
        if isinstance(q, Basic):
            return Basic(self.lpe(q.lpe), q.pattern)
        if isinstance(q, And):
            return And(self.query(q.left), self.query(q.right))
        if isinstance(q, QueryUnion):
            return QueryUnion(self.query(q.left), self.query(q.right))
        if isinstance(q, Project):
            return Project(q.variables, self.query(q.query))
        if isinstance(q, SeedUris):
            return SeedUris(q.uris, self.query(q.query))
        return SeedVar(q.var, self.query(q.query))

    def out(self, l: Lpe, v: Var) -> Query:
        """A query that, seeded with {ctx}, binds *v* to the URIs of ``[[l]]ctx``."""
        if isinstance(l, Epsilon):
            return Basic(EPS, _graph_of(v))
        if isinstance(l, Pattern):
            return self._out_link_pattern(l, v)
        if isinstance(l, Concat):
            x = self.fresh()
            return And(
                Basic(self.lpe(l.left), _graph_of(x)),
                SeedVar(x, self.out(l.right, v)),
            )
        if isinstance(l, Alt):
            return QueryUnion(self.out(l.left, v), self.out(l.right, v))
        if isinstance(l, Star):
            x = self.fresh()
            step = And(
                Basic(Star(self.lpe(l.inner)), _graph_of(x)),
                SeedVar(x, self.out(l.inner, v)),
            )
            return QueryUnion(Basic(EPS, _graph_of(v)), step)
        if isinstance(l, Test):
            x = self.fresh()
            # the inner SEED keeps only mappings that bind x to a URI
            witness = And(self.out(l.inner, x), SeedVar(x, Basic(EPS, Bgp())))
            return And(Basic(EPS, _graph_of(v)), Project(frozenset({v}), SeedVar(v, witness)))
        if isinstance(l, NavSub):
            return _rename_query(self.query(l.query), {l.var: v})
        raise TypeError(f"not an LPE: {l!r}")

    def _out_link_pattern(self, l: Pattern, v: Var) -> Query:
        positions = l.lp.wildcard_positions()
        if not positions:
            return Basic(EPS, Filter(_graph_of(v), Neq(v, v)))
        u, g = self.fresh(), self.fresh()
        branches: list[Query] = []
        for i in positions:
            slots = []
            for j, term in enumerate(l.lp):
                if j == i:
                    slots.append(v)
                elif term is Marker.CONTEXT:
                    slots.append(u)
                elif term is Marker.WILDCARD:
                    slots.append(self.fresh())
                else:
                    slots.append(term)
            branches.append(Basic(EPS, Graph(u, Bgp((TriplePattern(*slots),)))))
        return And(union_all(branches), SeedVar(v, Basic(EPS, _graph_of(g))))


def desugar(l: Lpe, fresh: FreshVars | None = None) -> Lpe:
    """An equivalent LPE built only from ``eps``, ``(?v : q)`` and ``*``.

    Generated variables come from the reserved ``?_gN`` namespace and avoid
    every variable already used in *l*.
    """
    if fresh is None:
        fresh = FreshVars(lpe_vars(l))
    return _Desugarer(fresh).lpe(l)


def desugar_query(q: Query) -> Query:
    """*q* with every LPE desugared."""
    return _Desugarer(FreshVars(query_vars(q))).query(q)


def is_core_lpe(l: Lpe) -> bool:
    """True iff *l* (and every nested query) only uses ``eps``, ``(?v : q)`` and ``*``."""
    if isinstance(l, Epsilon):
        return True
    if isinstance(l, Star):
        return is_core_lpe(l.inner)
    if isinstance(l, NavSub):
        return is_core_query(l.query)
    return False


def is_core_query(q: Query) -> bool:
    if isinstance(q, Basic):
        return is_core_lpe(q.lpe)
    if isinstance(q, (And, QueryUnion)):
        return is_core_query(q.left) and is_core_query(q.right)
    return is_core_query(q.query)
