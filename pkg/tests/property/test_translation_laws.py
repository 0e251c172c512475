"""Translated property paths, NautiLOD and reachability queries agree with their own semantics."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ldql.algebra import Var
from ldql.fixtures import parse_web
from ldql.formalisms import ReachCriterion
from ldql.oracles import eval_nautilod
from ldql.oracles import eval_pp_ctxt
from ldql.oracles import eval_reach
from ldql.semantics import eval_query
from ldql.translators import translate_nautilod
from ldql.translators import translate_pp
from ldql.translators import translate_reachability
from tests.property.strategies import nautilod_exprs
from tests.property.strategies import pair_pp_patterns
from tests.property.strategies import patterns
from tests.property.strategies import pp_patterns
from tests.property.strategies import property_settings
from tests.property.strategies import seed_sets
from tests.property.strategies import webs
from tests.webs import W1
from tests.webs import W2

pytestmark = pytest.mark.property

X = Var("x")


@property_settings(300)
@given(p=pp_patterns, web=webs())
def test_property_paths(p, web):
    assert eval_query(translate_pp(p), web, set()) == eval_pp_ctxt(p, web)


@property_settings(300)
@given(n=nautilod_exprs, web=webs(), data=st.data())
def test_nautilod(n, web, data):
    start = data.draw(st.sampled_from(sorted(web.dom())))
    result = eval_query(translate_nautilod(n), web, {start})
    assert {m[X] for m in result} == eval_nautilod(n, web, start)


@pytest.mark.parametrize("criterion", list(ReachCriterion))
@property_settings(100)
@given(p=patterns, web=webs(), seeds=seed_sets)
def test_reachability(criterion, p, web, seeds):
    q = translate_reachability(criterion, p)
    assert eval_query(q, web, seeds) == eval_reach(p, criterion, seeds, web)


# ---------------------------------------------------------------------------
# Separation
# ---------------------------------------------------------------------------


@property_settings(50)
@given(p=pair_pp_patterns)
def test_property_paths_cannot_tell_pair_webs_apart(p):
    assert eval_pp_ctxt(p, parse_web(W1)) == eval_pp_ctxt(p, parse_web(W2))
