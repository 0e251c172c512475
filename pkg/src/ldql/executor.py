"""Lookup-driven execution of certified LDQL queries.

Layer: Execution
May only import from: .errors, .rdf, .algebra, .lang, .rewrite, .safeness,
.syntax, .lookup, stdlib

The executor never sees the web as a whole. It starts from the seed URIs and
only learns about documents by looking URIs up through a
:class:`~ldql.lookup.LookupService`:

* ``exec_lpe`` follows link path expressions from a context URI;
* ``exec_basic`` selects documents with an LPE, assembles them into a
  dataset and evaluates the graph pattern over it;
* ``exec_union_free`` runs the subqueries of one conjunct in certificate
  order, harvesting seed URIs for ``SEED ?v q`` from the mappings computed
  by the subqueries placed before it;
* ``exec_query`` certifies a query, then unions the results of its
  conjuncts.

Queries that cannot be certified are refused up front with NotCertified.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Iterable
from collections.abc import Sequence
from dataclasses import dataclass
from dataclasses import field
from typing import Any

from ldql.algebra import UNIT
from ldql.algebra import GraphPattern
from ldql.algebra import Solution
from ldql.algebra import eval_pattern
from ldql.algebra import join
from ldql.errors import CertificateMismatch
from ldql.errors import NotCertified
from ldql.lang import Alt
from ldql.lang import Basic
from ldql.lang import Concat
from ldql.lang import Epsilon
from ldql.lang import Lpe
from ldql.lang import NavSub
from ldql.lang import Pattern
from ldql.lang import Project
from ldql.lang import Query
from ldql.lang import SeedUris
from ldql.lang import SeedVar
from ldql.lang import Star
from ldql.lang import Test
from ldql.lang import navsub_queries
from ldql.lookup import LookupService
from ldql.rdf import RdfDataset
from ldql.rdf import Triple
from ldql.rdf import Uri
from ldql.rdf import matches
from ldql.rewrite import DEFAULT_NORMAL_FORM_LIMIT
from ldql.rewrite import and_items
from ldql.rewrite import union_branches
from ldql.safeness import ConjunctOrder
from ldql.safeness import Justification
from ldql.safeness import Safe
from ldql.safeness import SafenessCertificate
from ldql.safeness import SeedVarBound
from ldql.safeness import is_websafe_syntactic
from ldql.safeness import validate_certificate

logger = logging.getLogger(__name__)

# ---------------------------------------------------------------------------
# Trace
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExecutionTrace:
    """What one execution looked up and how much work each algorithm did."""

    attempted: frozenset[Uri]
    retrieved: frozenset[Uri]
    failed: frozenset[Uri]
    cache_hits: int
    wall_time: float
    steps: dict[str, int] = field(default_factory=dict)

    @property
    def lookup_count(self) -> int:
        return len(self.attempted)

    def to_dict(self) -> dict[str, Any]:
        return {
            "lookups": self.lookup_count,
            "retrieved": sorted(u.value for u in self.retrieved),
            "failed": sorted(u.value for u in self.failed),
            "cache_hits": self.cache_hits,
            "wall_time": round(self.wall_time, 6),
            "steps": dict(sorted(self.steps.items())),
        }

    def render_text(self) -> str:
        lines = [
            f"lookups: {self.lookup_count} "
            f"({len(self.retrieved)} retrieved, {len(self.failed)} not retrievable)",
            f"cache hits: {self.cache_hits}",
            f"wall time: {self.wall_time:.3f}s",
        ]
        lines.extend(f"{name}: {count}" for name, count in sorted(self.steps.items()))
        lines.extend(f"  retrieved {u.n3()}" for u in sorted(self.retrieved))
        lines.extend(f"  failed {u.n3()}" for u in sorted(self.failed))
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Executor
# ---------------------------------------------------------------------------


class Executor:
    """Executes certified queries against one lookup service.

    Parameters
    ----------
    lookup:
        The backend every URI is dereferenced through.
    normal_form_limit:
        Node budget for the UNION normal form used by certification.
    validate:
        Re-check certificates before executing them.
    """

    def __init__(
        self,
        lookup: LookupService,
        normal_form_limit: int = DEFAULT_NORMAL_FORM_LIMIT,
        validate: bool = True,
    ):
        self.lookup = lookup
        self.normal_form_limit = normal_form_limit
        self.validate = validate
        self.steps: dict[str, int] = {}
        self._elapsed = 0.0
        self._lpe_memo: dict[tuple[Lpe, Uri], frozenset[Uri]] = {}
        self._certificates: dict[Query, SafenessCertificate] = {}

    def _count(self, step: str, n: int = 1) -> None:
        self.steps[step] = self.steps.get(step, 0) + n

    def trace(self) -> ExecutionTrace:
        return ExecutionTrace(
            attempted=self.lookup.attempted(),
            retrieved=self.lookup.retrieved(),
            failed=self.lookup.failed(),
            cache_hits=self.lookup.cache_hits,
            wall_time=self._elapsed,
            steps=dict(self.steps),
        )

    # -- certificates ------------------------------------------------------

    def certify(self, q: Query) -> SafenessCertificate:
        """The certificate of *q*; raises NotCertified when there is none."""
        cert = self._certificates.get(q)
        if cert is None:
            report = is_websafe_syntactic(q, limit=self.normal_form_limit)
            if report.certificate is None:
                raise NotCertified(report)
            cert = report.certificate
            self._certificates[q] = cert
        return cert

    def _remember(self, q: Query, cert: SafenessCertificate) -> None:
        self._certificates.setdefault(q, cert)

    # -- public ------------------------------------------------------------

    def exec_query(self, q: Query, seeds: Iterable[Uri]) -> frozenset[Solution]:
        cert = self.certify(q)
        if self.validate and not validate_certificate(q, cert, limit=self.normal_form_limit):
            raise CertificateMismatch("the certificate does not justify the query")
        started = time.perf_counter()
        try:
            result = self._run(cert, frozenset(seeds))
        finally:
            self._elapsed += time.perf_counter() - started
        logger.info(
            "executed query: %d solution(s), %d lookup(s)", len(result), self.lookup.lookup_count
        )
        return result

    def exec_lpe(self, l: Lpe, ctx: Uri) -> frozenset[Uri]:
        for nav in navsub_queries(l):
            self.certify(nav.query)
        return self._lpe(l, ctx)

    def exec_basic(
        self, lpe: Lpe, pattern: GraphPattern, seeds: Iterable[Uri]
    ) -> frozenset[Solution]:
        for nav in navsub_queries(lpe):
            self.certify(nav.query)
        return self._basic(lpe, pattern, frozenset(seeds))

    def exec_union_free(
        self, conjunct: Query, order: ConjunctOrder, seeds: Iterable[Uri]
    ) -> frozenset[Solution]:
        """Run the subqueries of *conjunct* in the order *order* prescribes."""
        items = and_items(conjunct)
        if sorted(order.order) != list(range(len(items))):
            raise CertificateMismatch(f"order {order.order} does not cover {len(items)} subqueries")
        return self._union_free(items, order, frozenset(seeds))

    # -- queries -----------------------------------------------------------

    def _run(self, cert: SafenessCertificate, seeds: frozenset[Uri]) -> frozenset[Solution]:
        branches = union_branches(cert.normal_form)
        out: set[Solution] = set()
        for conj in cert.conjuncts:
            out.update(self._union_free(and_items(branches[conj.index]), conj, seeds))
        return frozenset(out)

    def _union_free(
        self, items: Sequence[Query], order: ConjunctOrder, seeds: frozenset[Uri]
    ) -> frozenset[Solution]:
        self._count("union_free")
        omega = UNIT
        for i, just in zip(order.order, order.justifications):
            omega = join(omega, self._item(items[i], just, seeds, omega))
            if not omega:
                break
        return omega

    def _item(
        self,
        item: Query,
        just: Justification,
        seeds: frozenset[Uri],
        omega: frozenset[Solution],
    ) -> frozenset[Solution]:
        if isinstance(item, SeedVar):
            if not isinstance(just, SeedVarBound):
                raise CertificateMismatch(f"SEED {item.var.n3()} lacks a binding justification")
            return self._seed_var(item, just.certificate, omega)
        if not isinstance(just, Safe):
            raise CertificateMismatch("subquery justified as a SEED variable binding")
        if isinstance(item, Basic):
            for nav, cert in zip(navsub_queries(item.lpe), just.subcertificates):
                self._remember(nav.query, cert)
            return self._basic(item.lpe, item.pattern, seeds)
        if isinstance(item, Project):
            inner = self._run(just.subcertificates[0], seeds)
            return frozenset(m.project(item.variables) for m in inner)
        if isinstance(item, SeedUris):
            self.lookup.prefetch(sorted(item.uris))
            return self._run(just.subcertificates[0], item.uris)
        return self._run(just.subcertificates[0], seeds)

    def _seed_var(
        self, item: SeedVar, cert: SafenessCertificate, omega: frozenset[Solution]
    ) -> frozenset[Solution]:
        harvested = sorted({m[item.var] for m in omega if isinstance(m.get(item.var), Uri)})
        self._count("seed_var_seeds", len(harvested))
        self.lookup.prefetch(harvested)
        out: set[Solution] = set()
        for u in harvested:
            binding = Solution({item.var: u})
            out.update(join(self._run(cert, frozenset({u})), [binding]))
        return frozenset(out)

    def _basic(self, lpe: Lpe, pattern: GraphPattern, seeds: frozenset[Uri]) -> frozenset[Solution]:
        self._count("basic")
        self.lookup.prefetch(sorted(seeds))
        selected: set[Uri] = set()
        for u in sorted(seeds):
            selected.update(self._lpe(lpe, u))
        self.lookup.prefetch(sorted(selected))
        named: dict[Uri, frozenset[Triple]] = {}
        default: set[Triple] = set()
        for u in selected:
            doc = self.lookup.lookup(u)
            if doc is not None:
                named[u] = doc.data
                default.update(doc.data)
        ds = RdfDataset(default=frozenset(default), named=named)
        return eval_pattern(pattern, ds.default, ds)

    # -- link path expressions ---------------------------------------------

    def _lpe(self, l: Lpe, ctx: Uri) -> frozenset[Uri]:
        if self.lookup.lookup(ctx) is None:
            return frozenset()
        key = (l, ctx)
        cached = self._lpe_memo.get(key)
        if cached is None:
            self._count("lpe")
            cached = self._compute_lpe(l, ctx)
            self._lpe_memo[key] = cached
        return cached

    def _compute_lpe(self, l: Lpe, ctx: Uri) -> frozenset[Uri]:
        if isinstance(l, Epsilon):
            return frozenset({ctx})
        if isinstance(l, Pattern):
            doc = self.lookup.lookup(ctx)
            data = doc.data if doc is not None else frozenset()
            candidates = sorted(
                {u for triple in data for u in triple.uris() if matches((triple, u), l.lp, ctx)}
            )
            self.lookup.prefetch(candidates)
            return frozenset(u for u in candidates if self.lookup.lookup(u) is not None)
        if isinstance(l, Concat):
            out: set[Uri] = set()
            middle = sorted(self._lpe(l.left, ctx))
            self.lookup.prefetch(middle)
            for mid in middle:
                out.update(self._lpe(l.right, mid))
            return frozenset(out)
        if isinstance(l, Alt):
            return self._lpe(l.left, ctx) | self._lpe(l.right, ctx)
        if isinstance(l, Star):
            reached = {ctx}
            frontier = [ctx]
            while frontier:
                self._count("star_rounds")
                self.lookup.prefetch(frontier)
                found: set[Uri] = set()
                for current in frontier:
                    found.update(self._lpe(l.inner, current))
                frontier = sorted(found - reached)
                reached.update(frontier)
            return frozenset(reached)
        if isinstance(l, Test):
            return frozenset({ctx}) if self._lpe(l.inner, ctx) else frozenset()
        if isinstance(l, NavSub):
            cert = self.certify(l.query)
            return frozenset(
                value
                for value in (m.get(l.var) for m in self._run(cert, frozenset({ctx})))
                if isinstance(value, Uri)
            )
        raise TypeError(f"not an LPE: {l!r}")


# ---------------------------------------------------------------------------
# Module-level entry points
# ---------------------------------------------------------------------------


def exec_lpe(l: Lpe, ctx: Uri, lk: LookupService) -> frozenset[Uri]:
    """The URIs reached from *ctx* by *l*, discovered through *lk*."""
    return Executor(lk).exec_lpe(l, ctx)


def exec_basic(
    lpe: Lpe, p: GraphPattern, seeds: Iterable[Uri], lk: LookupService
) -> frozenset[Solution]:
    return Executor(lk).exec_basic(lpe, p, seeds)


def exec_union_free(
    conjunct: Query, order: ConjunctOrder, seeds: Iterable[Uri], lk: LookupService
) -> frozenset[Solution]:
    return Executor(lk).exec_union_free(conjunct, order, seeds)


def exec_query(
    q: Query,
    seeds: Iterable[Uri],
    lk: LookupService,
    *,
    normal_form_limit: int = DEFAULT_NORMAL_FORM_LIMIT,
) -> frozenset[Solution]:
    """Execute *q* from *seeds*; raises NotCertified for queries that cannot be certified."""
    return Executor(lk, normal_form_limit).exec_query(q, seeds)
