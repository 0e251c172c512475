"""Laws of the LDQL operators, strong boundedness and conjunct ordering."""

from __future__ import annotations

from itertools import permutations

import pytest
from hypothesis import assume
from hypothesis import given
from hypothesis import strategies as st

from ldql.errors import NonEnumerableResult
from ldql.fixtures import parse_web
from ldql.fixtures import serialize_web
from ldql.lang import And
from ldql.lang import Project
from ldql.lang import QueryUnion
from ldql.lang import SeedUris
from ldql.lang import SeedVar
from ldql.rewrite import sbvars_query
from ldql.safeness import admissible
from ldql.safeness import find_order
from ldql.semantics import eval_query
from tests.property.strategies import VARS
from tests.property.strategies import property_settings
from tests.property.strategies import queries
from tests.property.strategies import seed_sets
from tests.property.strategies import webs

pytestmark = pytest.mark.property


def _both(lhs, rhs, web, seeds):
    try:
        return eval_query(lhs, web, seeds), eval_query(rhs, web, seeds)
    except NonEnumerableResult:
        assume(False)


# ---------------------------------------------------------------------------
# Commutation and distribution
# ---------------------------------------------------------------------------


_LAWS = {
    "and_commutes": lambda a, b, c, s, v: (And(a, b), And(b, a)),
    "and_associates": lambda a, b, c, s, v: (And(And(a, b), c), And(a, And(b, c))),
    "union_commutes": lambda a, b, c, s, v: (QueryUnion(a, b), QueryUnion(b, a)),
    "union_associates": lambda a, b, c, s, v: (
        QueryUnion(QueryUnion(a, b), c),
        QueryUnion(a, QueryUnion(b, c)),
    ),
    "and_distributes": lambda a, b, c, s, v: (
        And(a, QueryUnion(b, c)),
        QueryUnion(And(a, b), And(a, c)),
    ),
    "seed_uris_distributes": lambda a, b, c, s, v: (
        SeedUris(s, QueryUnion(a, b)),
        QueryUnion(SeedUris(s, a), SeedUris(s, b)),
    ),
    "seed_var_distributes": lambda a, b, c, s, v: (
        SeedVar(v, QueryUnion(a, b)),
        QueryUnion(SeedVar(v, a), SeedVar(v, b)),
    ),
    "project_distributes": lambda a, b, c, s, v: (
        Project(frozenset({v}), QueryUnion(a, b)),
        QueryUnion(Project(frozenset({v}), a), Project(frozenset({v}), b)),
    ),
}


@pytest.mark.parametrize("law", sorted(_LAWS))
@property_settings(200)
@given(
    a=queries,
    b=queries,
    c=queries,
    s=seed_sets,
    v=st.sampled_from(VARS),
    web=webs(),
    seeds=seed_sets,
)
def test_equivalence(law, a, b, c, s, v, web, seeds):
    lhs, rhs = _LAWS[law](a, b, c, s, v)
    left, right = _both(lhs, rhs, web, seeds)
    assert left == right


# ---------------------------------------------------------------------------
# Strong boundedness
# ---------------------------------------------------------------------------


@property_settings(300)
@given(q=queries, web=webs(), seeds=seed_sets)
def test_strongly_bound_variables_are_always_bound(q, web, seeds):
    try:
        result = eval_query(q, web, seeds)
    except NonEnumerableResult:
        assume(False)
    bound = sbvars_query(q)
    assert all(bound <= set(m) for m in result)


# ---------------------------------------------------------------------------
# Conjunct ordering
# ---------------------------------------------------------------------------


def _exhaustive(items):
    for order in permutations(range(len(items))):
        bound: set = set()
        for i in order:
            if not admissible(items[i], bound):
                break
            bound |= sbvars_query(items[i])
        else:
            return True
    return False


@property_settings(200)
@given(items=st.lists(queries, min_size=1, max_size=6))
def test_find_order_is_complete(items):
    order = find_order(items)
    assert (order is not None) == _exhaustive(items)
    if order is not None:
        assert sorted(order) == list(range(len(items)))


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


@property_settings(100)
@given(web=webs())
def test_fixture_text_reads_back(web):
    assert parse_web(serialize_web(web)) == web
