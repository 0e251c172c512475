"""Shared pytest fixtures."""

from __future__ import annotations

import pytest

from ldql.fixtures import parse_web
from ldql.rdf import WebOfLinkedData
from tests.webs import W_EX


@pytest.fixture()
def wex() -> WebOfLinkedData:
    return parse_web(W_EX, name="wex")


@pytest.fixture()
def wex_file(tmp_path):
    path = tmp_path / "wex.ldw"
    path.write_text(W_EX, encoding="utf-8")
    return path
