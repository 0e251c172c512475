"""Unit tests for the ldql command line, driven through click's CliRunner."""

from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from ldql.cli import cli
from ldql.syntax import parse_query
from tests.webs import Q_EX
from tests.webs import Q_EX_DOUBLE_PRIME
from tests.webs import Q_EX_PRIME

_EXPECTED = (
    "?w=<http://example.org/uB> ?x=<http://example.org/uA> "
    "?y=<http://example.org/uB> ?z=<http://example.org/uC>"
)


@pytest.fixture()
def runner():
    return CliRunner()


def _invoke(runner, *args):
    return runner.invoke(cli, list(args), catch_exceptions=False)


# ---------------------------------------------------------------------------
# parse / analyze
# ---------------------------------------------------------------------------


class TestParse:
    def test_canonical_form(self, runner):
        result = _invoke(runner, "parse", "-q", "SEED {<http://example.org/uA>} << eps , {} >>")
        assert result.exit_code == 0
        assert result.output.strip() == "SEED { <http://example.org/uA> } << eps , { } >>"

    def test_query_file(self, runner, tmp_path):
        path = tmp_path / "q.ldql"
        path.write_text(Q_EX_PRIME, encoding="utf-8")
        result = _invoke(runner, "parse", str(path))
        assert result.exit_code == 0
        assert parse_query(result.output) == parse_query(Q_EX_PRIME)

    def test_structured(self, runner):
        result = _invoke(runner, "parse", "-q", Q_EX, "--format", "structured")
        assert result.exit_code == 0
        assert isinstance(json.loads(result.output), dict)

    def test_normal_form(self, runner):
        q = (
            "(<< eps , { ?a ?b ?c } >> AND "
            "(<< eps , { ?a ?b ?d } >> UNION << eps , { ?a ?b ?e } >>))"
        )
        result = _invoke(runner, "parse", "-q", q, "--normal-form")
        assert result.exit_code == 0
        assert "UNION" in result.output
        assert result.output.count("AND") == 2

    def test_parse_error_exits_2(self, runner):
        result = _invoke(runner, "parse", "-q", "<< eps ,")
        assert result.exit_code == 2
        assert "error:" in result.output

    def test_query_both_inline_and_file(self, runner, tmp_path):
        path = tmp_path / "q.ldql"
        path.write_text(Q_EX, encoding="utf-8")
        assert _invoke(runner, "parse", "-q", Q_EX, str(path)).exit_code == 1


class TestAnalyze:
    def test_certified(self, runner):
        result = _invoke(runner, "analyze", "-q", Q_EX_DOUBLE_PRIME)
        assert result.exit_code == 0
        assert result.output.startswith("verdict: certified")

    def test_not_certified_exits_3(self, runner):
        result = _invoke(runner, "analyze", "-q", Q_EX)
        assert result.exit_code == 3
        assert "verdict: not certified" in result.output

    def test_structured(self, runner):
        result = _invoke(runner, "analyze", "-q", Q_EX_DOUBLE_PRIME, "--format", "structured")
        assert json.loads(result.output)["verdict"] == "certified"


# ---------------------------------------------------------------------------
# eval / exec
# ---------------------------------------------------------------------------


class TestEval:
    def test_running_example(self, runner, wex_file):
        result = _invoke(
            runner, "eval", "-q", Q_EX_DOUBLE_PRIME, "-w", str(wex_file),
            "--seed", "http://example.org/uA",
        )
        assert result.exit_code == 0
        assert result.output.splitlines() == [_EXPECTED]

    def test_bracketed_seed(self, runner, wex_file):
        result = _invoke(
            runner, "eval", "-q", Q_EX_DOUBLE_PRIME, "-w", str(wex_file),
            "--seed", "<http://example.org/uA>",
        )
        assert result.output.splitlines() == [_EXPECTED]

    def test_uncertified_query_is_still_evaluated(self, runner, wex_file):
        result = _invoke(runner, "eval", "-q", Q_EX, "-w", str(wex_file))
        assert result.exit_code == 0
        assert len(result.output.splitlines()) == 2

    def test_non_enumerable_exits_4(self, runner, wex_file):
        q = "SEED ?x SEED <http://example.org/uA> << eps , { } >>"
        result = _invoke(runner, "eval", "-q", q, "-w", str(wex_file))
        assert result.exit_code == 4

    def test_structured(self, runner, wex_file):
        result = _invoke(
            runner, "eval", "-q", Q_EX_DOUBLE_PRIME, "-w", str(wex_file),
            "--seed", "http://example.org/uA", "--format", "structured",
        )
        data = json.loads(result.output)
        assert data["count"] == 1
        assert data["solutions"][0]["z"] == "<http://example.org/uC>"

    def test_bad_fixture_exits_2(self, runner, tmp_path):
        path = tmp_path / "bad.ldw"
        path.write_text("#doc d\nnot a triple\n", encoding="utf-8")
        result = _invoke(runner, "eval", "-q", Q_EX, "-w", str(path))
        assert result.exit_code == 2


class TestExec:
    def test_matches_eval(self, runner, wex_file):
        args = ["-q", Q_EX_DOUBLE_PRIME, "-w", str(wex_file), "--seed", "http://example.org/uA"]
        result = _invoke(runner, "exec", *args)
        assert result.exit_code == 0
        assert result.output.splitlines() == [_EXPECTED]

    def test_uncertified_exits_3(self, runner, wex_file):
        result = _invoke(runner, "exec", "-q", Q_EX, "-w", str(wex_file))
        assert result.exit_code == 3
        assert "not certified" in result.output

    def test_trace(self, runner, wex_file):
        result = _invoke(
            runner, "exec", "-q", Q_EX_DOUBLE_PRIME, "-w", str(wex_file),
            "--seed", "http://example.org/uA", "--trace",
        )
        assert result.exit_code == 0
        assert "cache hits:" in result.output

    def test_needs_exactly_one_backend(self, runner, wex_file):
        assert _invoke(runner, "exec", "-q", Q_EX_PRIME).exit_code == 1
        both = _invoke(runner, "exec", "-q", Q_EX_PRIME, "-w", str(wex_file), "--http")
        assert both.exit_code == 1

    def test_bad_setting(self, runner, wex_file):
        result = _invoke(
            runner, "exec", "-q", Q_EX_PRIME, "-w", str(wex_file), "--http-timeout", "0"
        )
        assert result.exit_code == 1


# ---------------------------------------------------------------------------
# translate / oracle
# ---------------------------------------------------------------------------


class TestTranslate:
    def test_pp_output_reads_back(self, runner):
        result = _invoke(
            runner, "translate", "--from", "pp", "-p", "?x <http://example.org/p1>* ?y"
        )
        assert result.exit_code == 0
        parse_query(result.output, allow_reserved=True)

    def test_nautilod_output_variable(self, runner):
        result = _invoke(
            runner, "translate", "--from", "nautilod", "-p", "<http://example.org/p1>",
            "--var", "?out",
        )
        assert result.output.startswith("PROJECT { ?out }")

    def test_reach_none(self, runner):
        result = _invoke(
            runner, "translate", "--from", "reach:none", "-p", "{ ?x <http://example.org/p1> ?y }"
        )
        assert result.output.strip() == "<< eps , { ?x <http://example.org/p1> ?y } >>"

    def test_translation_evaluates_like_oracle(self, runner, wex_file):
        text = "<http://example.org/p1>*"
        translated = _invoke(runner, "translate", "--from", "nautilod", "-p", text).output
        seed = ("--seed", "http://example.org/uA")
        via_eval = _invoke(runner, "eval", "-q", translated, "-w", str(wex_file), *seed)
        via_oracle = _invoke(
            runner, "oracle", "--formalism", "nautilod", "-p", text, "-w", str(wex_file), *seed
        )
        terms = {line.split("=", 1)[1] for line in via_eval.output.splitlines()}
        assert terms == set(via_oracle.output.splitlines())
        assert terms == {
            "<http://example.org/uA>",
            "<http://example.org/uB>",
            "<http://example.org/uC>",
        }

    def test_bad_input_exits_2(self, runner):
        result = _invoke(runner, "translate", "--from", "pp", "-p", "?x")
        assert result.exit_code == 2


class TestOracle:
    def test_pp(self, runner, wex_file):
        result = _invoke(
            runner, "oracle", "--formalism", "pp", "-p", "?x <http://example.org/p1> ?y",
            "-w", str(wex_file),
        )
        assert result.exit_code == 0
        assert len(result.output.splitlines()) == 2

    def test_nautilod_needs_one_seed(self, runner, wex_file):
        result = _invoke(
            runner, "oracle", "--formalism", "nautilod", "-p", "<>", "-w", str(wex_file)
        )
        assert result.exit_code == 1

    def test_nautilod_start_outside_dom(self, runner, wex_file):
        result = _invoke(
            runner, "oracle", "--formalism", "nautilod", "-p", "<>", "-w", str(wex_file),
            "--seed", "http://example.org/p2",
        )
        assert result.exit_code == 1

    def test_reach_structured(self, runner, wex_file):
        result = _invoke(
            runner, "oracle", "--formalism", "reach:all", "-p", "{ ?x <http://example.org/p2> ?y }",
            "-w", str(wex_file), "--seed", "http://example.org/uB", "--format", "structured",
        )
        assert json.loads(result.output)["count"] == 2
