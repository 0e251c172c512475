"""Unit tests for Settings."""

from __future__ import annotations

import pytest

from ldql.config import Settings
from ldql.rewrite import DEFAULT_NORMAL_FORM_LIMIT


class TestSettings:
    def test_defaults(self):
        s = Settings()
        assert s.normal_form_limit == DEFAULT_NORMAL_FORM_LIMIT
        assert s.output_format == "text"
        assert not s.structured

    @pytest.mark.parametrize(
        "changes",
        [
            {"output_format": "xml"},
            {"normal_form_limit": 0},
            {"http_timeout": 0},
            {"max_redirects": -1},
            {"host_delay": -0.5},
        ],
    )
    def test_rejects_bad_values(self, changes):
        with pytest.raises(ValueError):
            Settings(**changes)

    def test_dict_round_trip(self):
        s = Settings(normal_form_limit=50, http_timeout=2.5, host_delay=0.1, verbose=True)
        assert Settings.from_dict(s.to_dict()) == s

    def test_from_partial_dict(self):
        assert Settings.from_dict({"max_redirects": "2"}) == Settings(max_redirects=2)
