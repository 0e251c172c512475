"""SPARQL graph patterns with set semantics.

Layer: Algebra
May only import from: .rdf, stdlib

The fragment covered is the one LDQL embeds: basic graph patterns combined
with AND, OPT, UNION, FILTER, GRAPH and BIND. Filter and bind expressions
are limited to (in)equality of terms and the boolean connectives.
Evaluation follows SPARQL's error semantics: a FILTER whose expression
errors drops the mapping, a BIND whose expression errors keeps the mapping
and leaves the variable unbound.
"""

from __future__ import annotations

from collections.abc import Iterable
from collections.abc import Iterator
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Union

from ldql.rdf import BlankNode
from ldql.rdf import Literal
from ldql.rdf import RdfDataset
from ldql.rdf import Term
from ldql.rdf import Triple
from ldql.rdf import Uri
from ldql.rdf import term_key

# ---------------------------------------------------------------------------
# Variables and solution mappings
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("a variable name must not be empty")

    def n3(self) -> str:
        return f"?{self.name}"

    def __str__(self) -> str:
        return self.n3()


class Solution(Mapping[Var, Term]):
    """An immutable, hashable solution mapping (partial map Var -> Term)."""

    __slots__ = ("_data", "_hash")

    def __init__(self, data: Mapping[Var, Term] | Iterable[tuple[Var, Term]] = ()):
        self._data: dict[Var, Term] = dict(data)
        self._hash: int | None = None

    def __getitem__(self, key: Var) -> Term:
        return self._data[key]

    def __iter__(self) -> Iterator[Var]:
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._data.items()))
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Solution):
            return self._data == other._data
        if isinstance(other, Mapping):
            return self._data == dict(other)
        return NotImplemented

    def __repr__(self) -> str:
        return "{" + self.render() + "}"

    def render(self) -> str:
        """``?a=<u> ?b="x"`` with variables sorted by name."""
        return " ".join(f"{v.n3()}={self._data[v].n3()}" for v in sorted(self._data))

    def compatible(self, other: Mapping[Var, Term]) -> bool:
        small, large = (self, other) if len(self) <= len(other) else (other, self)
        for var, term in small.items():
            bound = large.get(var)
            if bound is not None and bound != term:
                return False
        return True

    def merge(self, other: Mapping[Var, Term]) -> Solution:
        merged = dict(self._data)
        merged.update(other)
        return Solution(merged)

    def project(self, variables: Iterable[Var]) -> Solution:
        keep = set(variables)
        return Solution((v, t) for v, t in self._data.items() if v in keep)


SolutionSet = frozenset  # frozenset[Solution]

EMPTY_SOLUTION = Solution()
UNIT: frozenset[Solution] = frozenset({EMPTY_SOLUTION})


def compatible(m1: Mapping[Var, Term], m2: Mapping[Var, Term]) -> bool:
    """True iff *m1* and *m2* agree on every variable they share."""
    return Solution(m1).compatible(m2)


def join(a: Iterable[Solution], b: Iterable[Solution]) -> frozenset[Solution]:
    """The join of two solution sets."""
    right = list(b)
    if not right:
        return frozenset()
    out = set()
    for m1 in a:
        for m2 in right:
            if m1.compatible(m2):
                out.add(m1.merge(m2))
    return frozenset(out)


def solution_sort_key(m: Solution) -> str:
    return m.render()


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    term: Term


@dataclass(frozen=True)
class Eq:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neq:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class AndExpr:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class OrExpr:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class NotExpr:
    inner: Expr


Expr = Union[Var, Const, Eq, Neq, AndExpr, OrExpr, NotExpr]


class _Error:
    """Marker for an expression evaluation error."""

    def __repr__(self) -> str:
        return "<error>"


_ERROR = _Error()
_Value = Union[Uri, BlankNode, Literal, bool, _Error]


def _eval_expr(e: Expr, m: Mapping[Var, Term]) -> _Value:
    if isinstance(e, Var):
        return m.get(e, _ERROR)
    if isinstance(e, Const):
        return e.term
    if isinstance(e, (Eq, Neq)):
        left, right = _eval_expr(e.left, m), _eval_expr(e.right, m)
        if isinstance(left, (bool, _Error)) or isinstance(right, (bool, _Error)):
            return _ERROR
        return (left == right) if isinstance(e, Eq) else (left != right)
    if isinstance(e, NotExpr):
        inner = _eval_expr(e.inner, m)
        return not inner if isinstance(inner, bool) else _ERROR
    left, right = _eval_expr(e.left, m), _eval_expr(e.right, m)
    lb = left if isinstance(left, bool) else None
    rb = right if isinstance(right, bool) else None
    if isinstance(e, AndExpr):
        if lb is False or rb is False:
            return False
        return True if lb and rb else _ERROR
    if lb is True or rb is True:
        return True
    return False if lb is False and rb is False else _ERROR


def eval_expr(e: Expr, m: Mapping[Var, Term]) -> Term | bool | None:
    """Value of *e* under *m*, or None when evaluation errors."""
    value = _eval_expr(e, m)
    return None if isinstance(value, _Error) else value


# ---------------------------------------------------------------------------
# Graph patterns
# ---------------------------------------------------------------------------

PatternSlot = Union[Uri, Literal, Var]


@dataclass(frozen=True)
class TriplePattern:
    s: PatternSlot
    p: PatternSlot
    o: PatternSlot

    def __iter__(self) -> Iterator[PatternSlot]:
        return iter((self.s, self.p, self.o))

    def variables(self) -> frozenset[Var]:
        return frozenset(t for t in self if isinstance(t, Var))


@dataclass(frozen=True)
class Bgp:
    triples: tuple[TriplePattern, ...] = ()


@dataclass(frozen=True)
class Join:
    left: GraphPattern
    right: GraphPattern


@dataclass(frozen=True)
class LeftJoin:
    left: GraphPattern
    right: GraphPattern


@dataclass(frozen=True)
class PatternUnion:
    left: GraphPattern
    right: GraphPattern


@dataclass(frozen=True)
class Filter:
    pattern: GraphPattern
    expr: Expr


@dataclass(frozen=True)
class Graph:
    graph: Uri | Var
    pattern: GraphPattern


@dataclass(frozen=True)
class Bind:
    pattern: GraphPattern
    expr: Expr
    var: Var

    def __post_init__(self) -> None:
        if self.var in pattern_vars(self.pattern):
            raise ValueError(f"BIND target {self.var.n3()} already occurs in the inner pattern")


GraphPattern = Union[Bgp, Join, LeftJoin, PatternUnion, Filter, Graph, Bind]


def _match_triple(
    tp: TriplePattern, triple: Triple, m: Solution
) -> Solution | None:
    bound = dict(m)
    for slot, term in zip(tp, triple):
        if isinstance(slot, Var):
            current = bound.get(slot)
            if current is None:
                bound[slot] = term
            elif current != term:
                return None
        elif slot != term:
            return None
    return Solution(bound)


def _eval_bgp(bgp: Bgp, graph: frozenset[Triple]) -> frozenset[Solution]:
    partial = [EMPTY_SOLUTION]
    for tp in bgp.triples:
        step = []
        for m in partial:
            for triple in graph:
                extended = _match_triple(tp, triple, m)
                if extended is not None:
                    step.append(extended)
        partial = step
        if not partial:
            break
    return frozenset(partial)


def eval_pattern(
    p: GraphPattern, active_graph: frozenset[Triple], ds: RdfDataset
) -> frozenset[Solution]:
    """Evaluate *p* over *active_graph*, resolving GRAPH against the named graphs of *ds*.

    BIND only binds RDF terms. A comparison or boolean connective yields no
    term, so like an evaluation error it keeps the mapping and leaves the
    target variable unbound.
    """
    if isinstance(p, Bgp):
        return _eval_bgp(p, active_graph)
    if isinstance(p, Join):
        return join(eval_pattern(p.left, active_graph, ds), eval_pattern(p.right, active_graph, ds))
    if isinstance(p, LeftJoin):
        left = eval_pattern(p.left, active_graph, ds)
        right = list(eval_pattern(p.right, active_graph, ds))
        out = set()
        for m1 in left:
            extended = [m1.merge(m2) for m2 in right if m1.compatible(m2)]
            out.update(extended or [m1])
        return frozenset(out)
    if isinstance(p, PatternUnion):
        return eval_pattern(p.left, active_graph, ds) | eval_pattern(p.right, active_graph, ds)
    if isinstance(p, Filter):
        return frozenset(
            m for m in eval_pattern(p.pattern, active_graph, ds) if eval_expr(p.expr, m) is True
        )
    if isinstance(p, Graph):
        if isinstance(p.graph, Uri):
            graph = ds.named.get(p.graph)
            return frozenset() if graph is None else eval_pattern(p.pattern, graph, ds)
        out = set()
        for name, graph in ds.named.items():
            binding = Solution({p.graph: name})
            for m in eval_pattern(p.pattern, graph, ds):
                if m.compatible(binding):
                    out.add(m.merge(binding))
        return frozenset(out)
    if isinstance(p, Bind):
        out = set()
        for m in eval_pattern(p.pattern, active_graph, ds):
            value = eval_expr(p.expr, m)
            if value is None or isinstance(value, bool):
                out.add(m)
            else:
                out.add(m.merge({p.var: value}))
        return frozenset(out)
    raise TypeError(f"not a graph pattern: {p!r}")


# ---------------------------------------------------------------------------
# Static properties
# ---------------------------------------------------------------------------


def sbvars_pattern(p: GraphPattern) -> frozenset[Var]:
    """Variables bound in every solution of *p*, over any graph and dataset."""
    if isinstance(p, Bgp):
        return frozenset().union(*(tp.variables() for tp in p.triples))
    if isinstance(p, Join):
        return sbvars_pattern(p.left) | sbvars_pattern(p.right)
    if isinstance(p, PatternUnion):
        return sbvars_pattern(p.left) & sbvars_pattern(p.right)
    if isinstance(p, (LeftJoin,)):
        return sbvars_pattern(p.left)
    if isinstance(p, (Filter, Bind)):
        return sbvars_pattern(p.pattern)
    if isinstance(p, Graph):
        inner = sbvars_pattern(p.pattern)
        return inner | {p.graph} if isinstance(p.graph, Var) else inner
    raise TypeError(f"not a graph pattern: {p!r}")


def expr_parts(e: Expr) -> Iterator[Var | Term]:
    if isinstance(e, Var):
        yield e
    elif isinstance(e, Const):
        yield e.term
    elif isinstance(e, NotExpr):
        yield from expr_parts(e.inner)
    else:
        yield from expr_parts(e.left)
        yield from expr_parts(e.right)


def triple_patterns(p: GraphPattern) -> Iterator[TriplePattern]:
    """Every triple pattern occurring anywhere in *p*, in syntactic order."""
    if isinstance(p, Bgp):
        yield from p.triples
    elif isinstance(p, (Join, LeftJoin, PatternUnion)):
        yield from triple_patterns(p.left)
        yield from triple_patterns(p.right)
    else:
        yield from triple_patterns(p.pattern)


def pattern_terms(p: GraphPattern) -> Iterator[Var | Term]:
    """Every variable and constant mentioned by *p*."""
    if isinstance(p, Bgp):
        for tp in p.triples:
            yield from tp
    elif isinstance(p, (Join, LeftJoin, PatternUnion)):
        yield from pattern_terms(p.left)
        yield from pattern_terms(p.right)
    elif isinstance(p, Filter):
        yield from pattern_terms(p.pattern)
        yield from expr_parts(p.expr)
    elif isinstance(p, Graph):
        yield p.graph
        yield from pattern_terms(p.pattern)
    elif isinstance(p, Bind):
        yield from pattern_terms(p.pattern)
        yield from expr_parts(p.expr)
        yield p.var


def pattern_vars(p: GraphPattern) -> frozenset[Var]:
    return frozenset(t for t in pattern_terms(p) if isinstance(t, Var))


def pattern_uris(p: GraphPattern) -> frozenset[Uri]:
    return frozenset(t for t in pattern_terms(p) if isinstance(t, Uri))


def rename_pattern(p: GraphPattern, renaming: Mapping[Var, Var]) -> GraphPattern:
    """*p* with variables substituted according to *renaming*."""

    def slot(t: PatternSlot) -> PatternSlot:
        return renaming.get(t, t) if isinstance(t, Var) else t

    def expr(e: Expr) -> Expr:
        if isinstance(e, Var):
            return renaming.get(e, e)
        if isinstance(e, Const):
            return e
        if isinstance(e, NotExpr):
            return NotExpr(expr(e.inner))
        return type(e)(expr(e.left), expr(e.right))

    if isinstance(p, Bgp):
        return Bgp(tuple(TriplePattern(slot(t.s), slot(t.p), slot(t.o)) for t in p.triples))
    if isinstance(p, (Join, LeftJoin, PatternUnion)):
        return type(p)(rename_pattern(p.left, renaming), rename_pattern(p.right, renaming))
    if isinstance(p, Filter):
        return Filter(rename_pattern(p.pattern, renaming), expr(p.expr))
    if isinstance(p, Graph):
        graph = renaming.get(p.graph, p.graph) if isinstance(p.graph, Var) else p.graph
        return Graph(graph, rename_pattern(p.pattern, renaming))
    return Bind(rename_pattern(p.pattern, renaming), expr(p.expr), renaming.get(p.var, p.var))


def sort_terms(terms: Iterable[Term]) -> list[Term]:
    return sorted(terms, key=term_key)
