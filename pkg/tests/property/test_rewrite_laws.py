"""Rewrites preserve meaning."""

from __future__ import annotations

import pytest
from hypothesis import assume
from hypothesis import given

from ldql.errors import NonEnumerableResult
from ldql.errors import NormalFormTooLarge
from ldql.rewrite import desugar
from ldql.rewrite import desugar_query
from ldql.rewrite import is_core_lpe
from ldql.rewrite import is_union_normal_form
from ldql.rewrite import rewrite_union_normal_form
from ldql.semantics import eval_lpe
from ldql.semantics import eval_query
from ldql.syntax import parse_query
from ldql.syntax import serialize_query
from tests.property.strategies import contexts
from tests.property.strategies import lpes
from tests.property.strategies import property_settings
from tests.property.strategies import queries
from tests.property.strategies import seed_sets
from tests.property.strategies import webs

pytestmark = pytest.mark.property


@property_settings(200)
@given(lpe=lpes, web=webs(), ctx=contexts)
def test_desugar_preserves_lpe_meaning(lpe, web, ctx):
    core = desugar(lpe)
    assert is_core_lpe(core)
    assert eval_lpe(core, web, ctx) == eval_lpe(lpe, web, ctx)


@property_settings(200)
@given(q=queries, web=webs(), seeds=seed_sets)
def test_desugar_preserves_query_meaning(q, web, seeds):
    try:
        expected = eval_query(q, web, seeds)
    except NonEnumerableResult:
        assume(False)
    assert eval_query(desugar_query(q), web, seeds) == expected


@property_settings(200)
@given(q=queries, web=webs(), seeds=seed_sets)
def test_normal_form_preserves_meaning(q, web, seeds):
    try:
        nf = rewrite_union_normal_form(q)
        expected = eval_query(q, web, seeds)
    except (NormalFormTooLarge, NonEnumerableResult):
        assume(False)
    assert is_union_normal_form(nf)
    assert eval_query(nf, web, seeds) == expected


@property_settings(100)
@given(q=queries)
def test_serialization_reads_back(q):
    assert parse_query(serialize_query(q)) == q
