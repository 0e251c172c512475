"""CLI entry point: parse, analyze, eval, exec, translate, oracle, publish.

Layer: CLI
May only import from: any ldql module, stdlib, click

Usage:
    ldql parse     (-q QUERY | QUERY_FILE) [--format F] [--normal-form | --desugar]
    ldql analyze   (-q QUERY | QUERY_FILE) [--format F]
    ldql eval      (-q QUERY | QUERY_FILE) -w FIXTURE [--seed URI]...
    ldql exec      (-q QUERY | QUERY_FILE) (-w FIXTURE | --http) [--seed URI]... [--trace]
    ldql translate --from pp|nautilod|reach:all|reach:none|reach:match -p INPUT [--var V]
    ldql oracle    --formalism pp|nautilod|reach:... -p INPUT -w FIXTURE [--seed URI]...
    ldql publish   FIXTURE [--host H] [--port P] [--base URL]

Results go to stdout, one solution mapping per line with variables sorted by
name, mappings sorted by their rendering. Diagnostics and execution traces
go to stderr.

Exit codes: 0 ok, 1 other error, 2 parse or fixture error, 3 query not
certified Web-safe, 4 result not enumerable.

Queries may use the reserved ``?_gN`` variables, so the output of
``translate`` can be fed back into ``eval`` and ``exec``.
"""

from __future__ import annotations

import contextlib
import json
import logging
import sys
from collections.abc import Iterable
from collections.abc import Iterator
from pathlib import Path
from typing import Any
from typing import Callable
from typing import NoReturn

import click

from ldql import oracles
from ldql import semantics
from ldql import translators
from ldql.algebra import Solution
from ldql.algebra import Var
from ldql.algebra import solution_sort_key
from ldql.config import Settings
from ldql.errors import FixtureError
from ldql.errors import LdqlError
from ldql.errors import NonEnumerableResult
from ldql.errors import NotCertified
from ldql.errors import ParseError
from ldql.executor import Executor
from ldql.fixtures import load_web
from ldql.formalisms import ReachCriterion
from ldql.formalisms import parse_nautilod
from ldql.formalisms import parse_pp_pattern
from ldql.lang import Query
from ldql.lookup import FixtureLookup
from ldql.lookup import HttpLookup
from ldql.lookup import LookupService
from ldql.rdf import Term
from ldql.rdf import Uri
from ldql.rdf import term_key
from ldql.rewrite import desugar_query
from ldql.rewrite import rewrite_union_normal_form
from ldql.safeness import is_websafe_syntactic
from ldql.syntax import parse_pattern
from ldql.syntax import parse_query
from ldql.syntax import query_to_dict
from ldql.syntax import serialize_query

logger = logging.getLogger(__name__)

_DEFAULTS = Settings()
_FORMATS = ("text", "structured")
_SOURCES = ("pp", "nautilod", "reach:all", "reach:none", "reach:match")

EXIT_ERROR = 1
EXIT_PARSE = 2
EXIT_NOT_CERTIFIED = 3
EXIT_NOT_ENUMERABLE = 4

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _fail(message: str, code: int) -> NoReturn:
    click.echo(f"error: {message}", err=True)
    raise SystemExit(code)


@contextlib.contextmanager
def _reporting() -> Iterator[None]:
    """Turn ldql errors into a diagnostic on stderr and the matching exit code."""
    try:
        yield
    except NotCertified as exc:
        click.echo(exc.report.render_text(), err=True)
        _fail(str(exc), EXIT_NOT_CERTIFIED)
    except NonEnumerableResult as exc:
        _fail(str(exc), EXIT_NOT_ENUMERABLE)
    except (ParseError, FixtureError) as exc:
        _fail(str(exc), EXIT_PARSE)
    except LdqlError as exc:
        _fail(str(exc), EXIT_ERROR)


def _read_text(inline: str | None, path: str | None, what: str) -> str:
    if (inline is None) == (path is None):
        _fail(f"give the {what} either inline or as a file, not both or neither", EXIT_ERROR)
    if inline is not None:
        return inline
    assert path is not None
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        _fail(f"cannot read {path}: {exc}", EXIT_ERROR)


def _read_query(inline: str | None, path: str | None) -> Query:
    return parse_query(_read_text(inline, path, "query"), allow_reserved=True)


def _seed_uris(values: Iterable[str]) -> frozenset[Uri]:
    seeds = set()
    for value in values:
        value = value.strip()
        if value.startswith("<") and value.endswith(">"):
            value = value[1:-1]
        if not value:
            _fail("empty seed URI", EXIT_ERROR)
        seeds.add(Uri(value))
    return frozenset(seeds)


def _emit_json(data: Any) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True))


def _emit_solutions(solutions: Iterable[Solution], settings: Settings) -> None:
    ordered = sorted(solutions, key=solution_sort_key)
    if settings.structured:
        _emit_json(
            {
                "solutions": [{v.name: m[v].n3() for v in sorted(m)} for m in ordered],
                "count": len(ordered),
            }
        )
        return
    for m in ordered:
        click.echo(m.render() or "{}")


def _emit_terms(terms: Iterable[Term], settings: Settings) -> None:
    ordered = sorted(terms, key=term_key)
    if settings.structured:
        _emit_json({"terms": [t.n3() for t in ordered], "count": len(ordered)})
        return
    for t in ordered:
        click.echo(t.n3())


def _settings(**kwargs: Any) -> Settings:
    ctx = click.get_current_context()
    verbose = bool(ctx.find_root().params.get("verbose", False))
    values = {k: v for k, v in kwargs.items() if v is not None}
    try:
        return Settings.from_dict({**values, "verbose": verbose})
    except ValueError as exc:
        _fail(str(exc), EXIT_ERROR)


# -- shared options ----------------------------------------------------------


def _query_options(fn: Callable[..., Any]) -> Callable[..., Any]:
    fn = click.argument("query_file", required=False, type=click.Path(dir_okay=False))(fn)
    return click.option("-q", "--query", "query", default=None, help="Query text.")(fn)


def _format_option(fn: Callable[..., Any]) -> Callable[..., Any]:
    return click.option(
        "--format",
        "output_format",
        type=click.Choice(_FORMATS),
        default="text",
        show_default=True,
        help="Plain text or JSON output.",
    )(fn)


def _limit_option(fn: Callable[..., Any]) -> Callable[..., Any]:
    return click.option(
        "--normal-form-limit",
        type=int,
        default=_DEFAULTS.normal_form_limit,
        show_default=True,
        help="Node budget for the UNION normal-form rewrite.",
    )(fn)


def _seed_option(fn: Callable[..., Any]) -> Callable[..., Any]:
    return click.option(
        "--seed",
        "seeds",
        multiple=True,
        help="Seed URI; repeat for several. None means the empty seed set.",
    )(fn)


# ---------------------------------------------------------------------------
# Group
# ---------------------------------------------------------------------------


@click.group(help="Link Traversal queries over a Web of Linked Data.")
@click.option("--verbose", is_flag=True, help="Debug logging on stderr.")
def cli(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


# ---------------------------------------------------------------------------
# parse
# ---------------------------------------------------------------------------


@cli.command()
@_query_options
@_format_option
@_limit_option
@click.option("--normal-form", is_flag=True, help="Print the UNION normal form instead.")
@click.option("--desugar", is_flag=True, help="Print the core-LPE form instead.")
def parse(
    query: str | None,
    query_file: str | None,
    output_format: str,
    normal_form_limit: int,
    normal_form: bool,
    desugar: bool,
) -> None:
    """Parse a query and print it in canonical form."""
    settings = _settings(output_format=output_format, normal_form_limit=normal_form_limit)
    with _reporting():
        q = _read_query(query, query_file)
        if desugar:
            q = desugar_query(q)
        if normal_form:
            q = rewrite_union_normal_form(q, settings.normal_form_limit)
        if settings.structured:
            _emit_json(query_to_dict(q))
        else:
            click.echo(serialize_query(q))


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


@cli.command()
@_query_options
@_format_option
@_limit_option
def analyze(
    query: str | None, query_file: str | None, output_format: str, normal_form_limit: int
) -> None:
    """Decide whether a query is certified Web-safe and show the certificate.

    Exits with 3 when the query cannot be certified.
    """
    settings = _settings(output_format=output_format, normal_form_limit=normal_form_limit)
    with _reporting():
        report = is_websafe_syntactic(
            _read_query(query, query_file), limit=settings.normal_form_limit
        )
    if settings.structured:
        _emit_json(report.to_dict())
    else:
        click.echo(report.render_text())
    if not report.certified:
        raise SystemExit(EXIT_NOT_CERTIFIED)


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


@cli.command(name="eval")
@_query_options
@click.option("-w", "--web", "web_path", required=True, help="Fixture web file.")
@_seed_option
@_format_option
@_limit_option
def eval_(
    query: str | None,
    query_file: str | None,
    web_path: str,
    seeds: tuple[str, ...],
    output_format: str,
    normal_form_limit: int,
) -> None:
    """Evaluate a query over a fixture web by its definition."""
    settings = _settings(output_format=output_format, normal_form_limit=normal_form_limit)
    with _reporting():
        q = _read_query(query, query_file)
        web = load_web(web_path)
        result = semantics.eval_query(
            q, web, _seed_uris(seeds), normal_form_limit=settings.normal_form_limit
        )
    _emit_solutions(result, settings)


# ---------------------------------------------------------------------------
# exec
# ---------------------------------------------------------------------------


@cli.command(name="exec")
@_query_options
@click.option("-w", "--web", "web_path", default=None, help="Fixture web file.")
@click.option("--http", "use_http", is_flag=True, help="Dereference URIs over HTTP(S).")
@_seed_option
@_format_option
@_limit_option
@click.option("--trace", is_flag=True, help="Print a lookup summary on stderr.")
@click.option(
    "--http-timeout",
    type=float,
    default=_DEFAULTS.http_timeout,
    show_default=True,
    help="Per-request timeout in seconds.",
)
@click.option(
    "--max-redirects",
    type=int,
    default=_DEFAULTS.max_redirects,
    show_default=True,
    help="Redirects followed per lookup.",
)
@click.option(
    "--host-delay",
    type=float,
    default=_DEFAULTS.host_delay,
    show_default=True,
    help="Minimum seconds between two requests to the same host.",
)
def exec_(
    query: str | None,
    query_file: str | None,
    web_path: str | None,
    use_http: bool,
    seeds: tuple[str, ...],
    output_format: str,
    normal_form_limit: int,
    trace: bool,
    http_timeout: float,
    max_redirects: int,
    host_delay: float,
) -> None:
    """Execute a certified query by looking URIs up, starting from the seeds.

    Exits with 3 when the query cannot be certified Web-safe.
    """
    if (web_path is None) == (not use_http):
        _fail("give exactly one of --web FIXTURE and --http", EXIT_ERROR)
    settings = _settings(
        output_format=output_format,
        normal_form_limit=normal_form_limit,
        trace=trace,
        http_timeout=http_timeout,
        max_redirects=max_redirects,
        host_delay=host_delay,
    )
    logger.debug("exec settings: %s", settings.to_dict())
    with _reporting():
        q = _read_query(query, query_file)
        seed_set = _seed_uris(seeds)
        lookup: LookupService
        if use_http:
            lookup = HttpLookup(
                timeout=settings.http_timeout,
                max_redirects=settings.max_redirects,
                host_delay=settings.host_delay,
            )
        else:
            assert web_path is not None
            lookup = FixtureLookup(load_web(web_path))
        executor = Executor(lookup, settings.normal_form_limit)
        try:
            result = executor.exec_query(q, seed_set)
        finally:
            if isinstance(lookup, HttpLookup):
                lookup.close()
    _emit_solutions(result, settings)
    if settings.trace:
        summary = executor.trace()
        if settings.structured:
            click.echo(json.dumps({"trace": summary.to_dict()}, sort_keys=True), err=True)
        else:
            click.echo(summary.render_text(), err=True)


# ---------------------------------------------------------------------------
# translate
# ---------------------------------------------------------------------------


def _translate(source: str, text: str, var: str) -> Query:
    if source == "pp":
        return translators.translate_pp(parse_pp_pattern(text))
    if source == "nautilod":
        return translators.translate_nautilod(parse_nautilod(text), Var(var))
    criterion = ReachCriterion(source.split(":", 1)[1])
    return translators.translate_reachability(criterion, parse_pattern(text))


@cli.command()
@click.option(
    "--from", "source", type=click.Choice(_SOURCES), required=True, help="Input formalism."
)
@click.option("-p", "--input", "text", required=True, help="PP pattern, NautiLOD or pattern.")
@click.option(
    "--var", default="x", show_default=True, help="Output variable of NautiLOD translations."
)
@_format_option
def translate(source: str, text: str, var: str, output_format: str) -> None:
    """Translate a property path, NautiLOD expression or reachability query into LDQL.

    \b
    pp:       ?x <p1>/!(<p2>|<p3>)* ?y     (endpoints: ?var, <uri> or "literal")
    nautilod: <p1>/<p2>^/<>*[ASK { ?s <p> ?o }]   (<> is any forward step)
    reach:*:  { ?x <p1> ?y }
    """
    settings = _settings(output_format=output_format)
    with _reporting():
        q = _translate(source, text, var.lstrip("?"))
    if settings.structured:
        _emit_json(query_to_dict(q))
    else:
        click.echo(serialize_query(q))


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------


@cli.command()
@click.option(
    "--formalism", type=click.Choice(_SOURCES), required=True, help="Formalism to evaluate."
)
@click.option("-p", "--input", "text", required=True, help="PP pattern, NautiLOD or pattern.")
@click.option("-w", "--web", "web_path", required=True, help="Fixture web file.")
@_seed_option
@_format_option
def oracle(
    formalism: str, text: str, web_path: str, seeds: tuple[str, ...], output_format: str
) -> None:
    """Evaluate a formalism by its own semantics over a fixture web.

    NautiLOD takes exactly one --seed, the start URI; property paths take
    none.
    """
    settings = _settings(output_format=output_format)
    with _reporting():
        web = load_web(web_path)
        seed_set = _seed_uris(seeds)
        if formalism == "pp":
            _emit_solutions(oracles.eval_pp_ctxt(parse_pp_pattern(text), web), settings)
            return
        if formalism == "nautilod":
            n = parse_nautilod(text)
            if len(seed_set) != 1:
                _fail("NautiLOD needs exactly one --seed", EXIT_ERROR)
            (start,) = seed_set
            if start not in web.dom():
                _fail(f"{start.n3()} is not in dom(adoc)", EXIT_ERROR)
            _emit_terms(oracles.eval_nautilod(n, web, start), settings)
            return
        criterion = ReachCriterion(formalism.split(":", 1)[1])
        result = oracles.eval_reach(parse_pattern(text), criterion, seed_set, web)
        _emit_solutions(result, settings)


# ---------------------------------------------------------------------------
# publish
# ---------------------------------------------------------------------------


@cli.command()
@click.argument("fixture", type=click.Path(exists=True, dir_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True, help="Interface to bind.")
@click.option("--port", default=8080, show_default=True, help="Port to listen on.")
@click.option(
    "--base",
    default=None,
    help="Scheme and authority of the fixture URIs, when they differ from the server address.",
)
@click.option(
    "--redirect/--no-redirect",
    default=True,
    show_default=True,
    help="Answer URIs with a 303 to their document URL.",
)
def publish(fixture: str, host: str, port: int, base: str | None, redirect: bool) -> None:
    """Serve a fixture web over HTTP as N-Triples documents."""
    from ldql.publisher import run_server

    settings = _settings()
    with _reporting():
        web = load_web(fixture)
    click.echo(f"Publishing {len(web.docs)} document(s) on http://{host}:{port}", err=True)
    run_server(web, host=host, port=port, base=base, redirect=redirect, verbose=settings.verbose)
