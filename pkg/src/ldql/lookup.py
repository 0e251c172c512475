"""URI lookup backends for the executor.

Layer: Execution
May only import from: .errors, .rdf, .fixtures, httpx, stdlib

A lookup either retrieves a document or returns ``None`` (not retrievable).
Every backend memoises its answers for its lifetime, so the web looks fixed
for the duration of one execution, and counts distinct dereference attempts.
Lookups may be issued from several threads at once; a URI that is already
being fetched is waited for rather than fetched twice.
"""

from __future__ import annotations

import abc
import logging
import random
import threading
import time
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import Any
from urllib.parse import urlsplit

import httpx

from ldql.errors import FixtureError
from ldql.fixtures import parse_ntriples
from ldql.rdf import Document
from ldql.rdf import Uri
from ldql.rdf import WebOfLinkedData

logger = logging.getLogger(__name__)

_DEFAULT_TIMEOUT = 10.0
_DEFAULT_MAX_REDIRECTS = 5
_DEFAULT_WORKERS = 8
_ACCEPT = "application/n-triples, text/plain;q=0.5"
_DEREFERENCEABLE = ("http", "https")

# ---------------------------------------------------------------------------
# Base class
# ---------------------------------------------------------------------------


class LookupService(abc.ABC):
    """Memoising, thread-safe front for a dereferencing backend."""

    def __init__(self, workers: int = _DEFAULT_WORKERS):
        self.workers = workers
        self._lock = threading.Lock()
        self._cache: dict[Uri, Document | None] = {}
        self._inflight: dict[Uri, threading.Event] = {}
        self._hits = 0

    @abc.abstractmethod
    def _fetch(self, uri: Uri) -> Document | None:
        """Dereference *uri* once. Only called on a cache miss."""

    def lookup(self, uri: Uri) -> Document | None:
        with self._lock:
            if uri in self._cache:
                self._hits += 1
                return self._cache[uri]
            waiter = self._inflight.get(uri)
            owner = waiter is None
            if waiter is None:
                waiter = self._inflight[uri] = threading.Event()
        if not owner:
            waiter.wait()
            with self._lock:
                return self._cache[uri]
        doc: Document | None = None
        try:
            doc = self._fetch(uri)
        finally:
            with self._lock:
                self._cache[uri] = doc
                del self._inflight[uri]
            waiter.set()
        logger.debug("lookup %s -> %s", uri, "retrieved" if doc is not None else "not retrievable")
        return doc

    def prefetch(self, uris: Iterable[Uri]) -> None:
        """Look up every URI in *uris*, concurrently when there are several."""
        with self._lock:
            todo = [u for u in dict.fromkeys(uris) if u not in self._cache]
        if len(todo) < 2 or self.workers < 2:
            for u in todo:
                self.lookup(u)
            return
        with ThreadPoolExecutor(max_workers=min(self.workers, len(todo))) as pool:
            list(pool.map(self.lookup, todo))

    # -- accounting ----------------------------------------------------------

    @property
    def lookup_count(self) -> int:
        """Distinct URIs dereferenced so far; cache hits are not counted."""
        with self._lock:
            return len(self._cache)

    @property
    def cache_hits(self) -> int:
        with self._lock:
            return self._hits

    def attempted(self) -> frozenset[Uri]:
        with self._lock:
            return frozenset(self._cache)

    def retrieved(self) -> frozenset[Uri]:
        with self._lock:
            return frozenset(u for u, doc in self._cache.items() if doc is not None)

    def failed(self) -> frozenset[Uri]:
        with self._lock:
            return frozenset(u for u, doc in self._cache.items() if doc is None)


# ---------------------------------------------------------------------------
# Backends
# ---------------------------------------------------------------------------


class FixtureLookup(LookupService):
    """Serves the documents of an in-memory web."""

    def __init__(self, web: WebOfLinkedData, workers: int = _DEFAULT_WORKERS):
        super().__init__(workers)
        self.web = web

    def _fetch(self, uri: Uri) -> Document | None:
        return self.web.doc_for(uri)


class ChaosLookup(LookupService):
    """Wraps another backend with random latency and a shuffled prefetch order.

    Results must not depend on either; the determinism tests rely on this
    wrapper to perturb completion order.
    """

    def __init__(
        self,
        inner: LookupService,
        seed: int = 0,
        max_delay: float = 0.002,
        workers: int = _DEFAULT_WORKERS,
    ):
        super().__init__(workers)
        self.inner = inner
        self.max_delay = max_delay
        self._rng = random.Random(seed)
        self._rng_lock = threading.Lock()

    def _jitter(self) -> float:
        with self._rng_lock:
            return self._rng.uniform(0, self.max_delay)

    def _fetch(self, uri: Uri) -> Document | None:
        time.sleep(self._jitter())
        return self.inner.lookup(uri)

    def prefetch(self, uris: Iterable[Uri]) -> None:
        todo = list(uris)
        with self._rng_lock:
            self._rng.shuffle(todo)
        super().prefetch(todo)


class HttpLookup(LookupService):
    """Dereferences URIs over HTTP(S) and parses N-Triples responses.

    Non-2xx responses, transport errors, timeouts, too many redirects and
    unparsable bodies all make a URI not retrievable. The document id of a
    retrieved document is the final URL after redirects; the document is
    registered under the requested URI.

    Parameters
    ----------
    timeout:
        Per-request timeout in seconds.
    max_redirects:
        Redirects followed before giving up.
    host_delay:
        Minimum seconds between two requests to the same host.
    client:
        An existing ``httpx.Client`` to send requests with (for example a
        FastAPI ``TestClient``). It is not closed by :meth:`close`. The
        timeout is passed on every request and the redirect limit is checked
        against the response history, so both apply to a borrowed client too.
    """

    def __init__(
        self,
        timeout: float = _DEFAULT_TIMEOUT,
        max_redirects: int = _DEFAULT_MAX_REDIRECTS,
        host_delay: float = 0.0,
        client: httpx.Client | None = None,
        workers: int = _DEFAULT_WORKERS,
    ):
        super().__init__(workers)
        self.timeout = timeout
        self.max_redirects = max_redirects
        self.host_delay = host_delay
        self._owns_client = client is None
        self._client = client or httpx.Client(
            timeout=timeout,
            follow_redirects=True,
            max_redirects=max_redirects,
            trust_env=True,
        )
        self._host_lock = threading.Lock()
        self._next_slot: dict[str, float] = {}

    def __enter__(self) -> HttpLookup:
        return self

    def __exit__(self, *exc: Any) -> None:
        self.close()

    def close(self) -> None:
        if self._owns_client:
            self._client.close()

    def _wait_for_host(self, host: str) -> None:
        if self.host_delay <= 0:
            return
        with self._host_lock:
            now = time.monotonic()
            slot = max(now, self._next_slot.get(host, now))
            self._next_slot[host] = slot + self.host_delay
        if slot > now:
            time.sleep(slot - now)

    def _fetch(self, uri: Uri) -> Document | None:
        parts = urlsplit(uri.value)
        if parts.scheme not in _DEREFERENCEABLE:
            logger.debug("not dereferencing %s: scheme %r", uri, parts.scheme)
            return None
        self._wait_for_host(parts.netloc)
        try:
            response = self._client.get(
                uri.value,
                headers={"Accept": _ACCEPT},
                follow_redirects=True,
                timeout=self.timeout,
            )
        except (httpx.HTTPError, httpx.InvalidURL) as exc:
            logger.warning("lookup of %s failed: %s", uri, exc)
            return None
        for hop in response.history:
            logger.debug("%s redirected via %s", uri, hop.headers.get("location", "?"))
        if len(response.history) > self.max_redirects:
            logger.warning("lookup of %s exceeded %d redirects", uri, self.max_redirects)
            return None
        if not response.is_success:
            logger.warning("lookup of %s returned HTTP %d", uri, response.status_code)
            return None
        doc_id = str(response.url)
        try:
            triples = parse_ntriples(response.text, doc_id)
        except FixtureError as exc:
            logger.warning("lookup of %s returned unparsable data: %s", uri, exc)
            return None
        return Document(doc_id, triples)
