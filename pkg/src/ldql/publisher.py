"""FastAPI application that publishes a fixture web as Linked Data.

Layer: HTTP
May only import from: .errors, .rdf, .fixtures, fastapi, uvicorn, stdlib

Every URI in dom(adoc) dereferences to its document as N-Triples. With
``redirect`` on, a URI answers ``303 See Other`` pointing at the document's
own URL under ``/_doc/``, the usual shape of a Linked Data server; the
document id a client ends up with is then shared by all URIs that retrieve
the same document. Anything else is a 404.

URIs are matched in full, so the served fixture must use URIs whose scheme
and authority are the ones clients connect to, or the app is given a
``base`` that replaces them.
"""

from __future__ import annotations

import logging
from urllib.parse import quote

from fastapi import FastAPI
from fastapi import HTTPException
from fastapi import Request
from fastapi.responses import RedirectResponse
from fastapi.responses import Response

from ldql.fixtures import serialize_document
from ldql.rdf import Uri
from ldql.rdf import WebOfLinkedData

logger = logging.getLogger(__name__)

_MEDIA_TYPE = "application/n-triples"
_DOC_PREFIX = "/_doc/"
_DEFAULT_HOST = "127.0.0.1"
_DEFAULT_PORT = 8080

# ---------------------------------------------------------------------------
# App factory
# ---------------------------------------------------------------------------


def _requested_uri(request: Request, base: str | None) -> Uri:
    if base is None:
        return Uri(str(request.url))
    uri = base.rstrip("/") + request.url.path
    if request.url.query:
        uri = f"{uri}?{request.url.query}"
    return Uri(uri)


def create_app(web: WebOfLinkedData, base: str | None = None, redirect: bool = True) -> FastAPI:
    """Create the publishing application.

    Parameters
    ----------
    web:
        The web whose documents are served.
    base:
        Scheme and authority the fixture URIs use, when they differ from the
        address the server is reached at (``http://example.org``). ``None``
        matches the request URL as received.
    redirect:
        Answer dom(adoc) URIs with a 303 to the document URL instead of
        serving the document directly.
    """
    app = FastAPI(title="ldql-publisher")
    rendered: dict[str, str] = {}

    def _document(doc_id: str) -> Response:
        if doc_id not in web.docs:
            raise HTTPException(status_code=404, detail=f"no document {doc_id!r}")
        body = rendered.get(doc_id)
        if body is None:
            body = rendered[doc_id] = serialize_document(web.docs[doc_id])
        return Response(content=body, media_type=_MEDIA_TYPE)

    # -----------------------------------------------------------------------
    # Health
    # -----------------------------------------------------------------------

    @app.get("/_ping")
    async def ping() -> Response:
        return Response(content="pong", media_type="text/plain")

    # -----------------------------------------------------------------------
    # Documents
    # -----------------------------------------------------------------------

    @app.get(_DOC_PREFIX + "{doc_id:path}")
    async def document(doc_id: str) -> Response:
        return _document(doc_id)

    @app.get("/{path:path}")
    async def dereference(path: str, request: Request) -> Response:
        uri = _requested_uri(request, base)
        doc_id = web.adoc.get(uri)
        if doc_id is None:
            logger.debug("404 for %s", uri)
            raise HTTPException(status_code=404, detail=f"{uri.n3()} is not in dom(adoc)")
        if redirect:
            target = str(request.base_url).rstrip("/") + _DOC_PREFIX + quote(doc_id, safe="")
            return RedirectResponse(target, status_code=303)
        return _document(doc_id)

    return app


# ---------------------------------------------------------------------------
# Server
# ---------------------------------------------------------------------------


def run_server(
    web: WebOfLinkedData,
    host: str = _DEFAULT_HOST,
    port: int = _DEFAULT_PORT,
    base: str | None = None,
    redirect: bool = True,
    verbose: bool = False,
) -> None:
    """Serve *web* until interrupted."""
    import uvicorn

    app = create_app(web, base=base, redirect=redirect)
    config = uvicorn.Config(
        app,
        host=host,
        port=port,
        log_level="info" if verbose else "warning",
        access_log=verbose,
    )
    uvicorn.Server(config).run()
