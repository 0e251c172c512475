"""Web-safeness analysis with checkable certificates.

Layer: Analysis
May only import from: .errors, .rdf, .algebra, .lang, .rewrite, .syntax, stdlib

The analysis decides a sufficient condition only. A query is certified when,
after rewriting it to UNION normal form, the subqueries of every UNION-free
conjunct can be ordered so that each one is either Web-safe on its own or is
``SEED ?v q`` with ``q`` Web-safe and ``?v`` strongly bound by an earlier
subquery. A query that fails is reported as "not certified", which says
nothing about whether it is actually unsafe.

Web-safe on its own means:

* ``<< lpe , P >>`` whose every ``(?v : q)`` has a certified ``q``;
* ``PROJECT V (q)`` or ``SEED U q`` with ``q`` certified.

Ordering is greedy. Whether a subquery may be placed next only depends on
the set of variables bound by the subqueries already placed, and that set
only grows, so a subquery that is admissible stays admissible. Greedy
placement therefore finds an order whenever one exists.
"""

from __future__ import annotations

import enum
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from dataclasses import field
from typing import Any
from typing import Union

from ldql.algebra import Var
from ldql.errors import LdqlError
from ldql.lang import Basic
from ldql.lang import Lpe
from ldql.lang import NavSub
from ldql.lang import Project
from ldql.lang import Query
from ldql.lang import SeedUris
from ldql.lang import SeedVar
from ldql.lang import lpe_children
from ldql.lang import navsub_queries
from ldql.rewrite import DEFAULT_NORMAL_FORM_LIMIT
from ldql.rewrite import and_items
from ldql.rewrite import is_union_normal_form
from ldql.rewrite import rewrite_union_normal_form
from ldql.rewrite import sbvars_query
from ldql.rewrite import union_branches
from ldql.syntax import parse_query
from ldql.syntax import serialize_query

logger = logging.getLogger(__name__)

# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------


class Verdict(str, enum.Enum):
    CERTIFIED = "certified"
    NOT_CERTIFIED = "not certified"


@dataclass(frozen=True)
class Safe:
    """The subquery is Web-safe on its own.

    ``subcertificates`` holds one certificate per ``(?v : q)`` of a basic
    query (preorder), or the single certificate of the subquery under
    PROJECT / SEED U.
    """

    subcertificates: tuple[SafenessCertificate, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {"kind": "safe", "subcertificates": [c.to_dict() for c in self.subcertificates]}


@dataclass(frozen=True)
class SeedVarBound:
    """``SEED ?v q`` whose ``?v`` is bound by the subqueries at the ``providers`` positions."""

    variable: Var
    providers: tuple[int, ...]
    certificate: SafenessCertificate

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": "seed_var_bound",
            "variable": self.variable.name,
            "providers": list(self.providers),
            "certificate": self.certificate.to_dict(),
        }


Justification = Union[Safe, SeedVarBound]


@dataclass(frozen=True)
class ConjunctOrder:
    """Execution order of one UNION-free conjunct.

    ``order[k]`` is the index (in AND order) of the subquery placed at
    position ``k``; ``justifications[k]`` justifies that placement.
    """

    index: int
    order: tuple[int, ...]
    justifications: tuple[Justification, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "order": list(self.order),
            "justifications": [j.to_dict() for j in self.justifications],
        }


@dataclass(frozen=True)
class SafenessCertificate:
    normal_form: Query
    conjuncts: tuple[ConjunctOrder, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "normal_form": serialize_query(self.normal_form),
            "conjuncts": [c.to_dict() for c in self.conjuncts],
        }


def _justification_from_dict(data: dict[str, Any]) -> Justification:
    if data["kind"] == "safe":
        return Safe(tuple(certificate_from_dict(c) for c in data["subcertificates"]))
    if data["kind"] == "seed_var_bound":
        return SeedVarBound(
            Var(data["variable"]),
            tuple(int(p) for p in data["providers"]),
            certificate_from_dict(data["certificate"]),
        )
    raise ValueError(f"unknown justification kind {data['kind']!r}")


def certificate_from_dict(data: dict[str, Any]) -> SafenessCertificate:
    """Inverse of ``SafenessCertificate.to_dict``."""
    return SafenessCertificate(
        normal_form=parse_query(data["normal_form"], allow_reserved=True),
        conjuncts=tuple(
            ConjunctOrder(
                index=int(c["index"]),
                order=tuple(int(i) for i in c["order"]),
                justifications=tuple(_justification_from_dict(j) for j in c["justifications"]),
            )
            for c in data["conjuncts"]
        ),
    )


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Refusal:
    """Why one subquery of one conjunct could not be placed."""

    conjunct: int
    subquery: str
    variable: str | None
    reason: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "conjunct": self.conjunct,
            "subquery": self.subquery,
            "variable": self.variable,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class SafenessReport:
    verdict: Verdict
    certificate: SafenessCertificate | None = None
    refusals: tuple[Refusal, ...] = field(default_factory=tuple)

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.CERTIFIED

    def summary(self) -> str:
        if self.certified:
            return self.verdict.value
        reasons = "; ".join(f"conjunct {r.conjunct}: {r.reason}" for r in self.refusals)
        return f"{self.verdict.value}: {reasons}" if reasons else self.verdict.value

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "certificate": self.certificate.to_dict() if self.certificate else None,
            "refusals": [r.to_dict() for r in self.refusals],
        }

    def render_text(self) -> str:
        lines = [f"verdict: {self.verdict.value}"]
        if self.certificate is not None:
            nf = self.certificate.normal_form
            lines.append(f"normal form: {serialize_query(nf)}")
            branches = union_branches(nf)
            for conj in self.certificate.conjuncts:
                items = and_items(branches[conj.index])
                lines.append(f"conjunct {conj.index}: order {', '.join(map(str, conj.order))}")
                for pos, (i, just) in enumerate(zip(conj.order, conj.justifications)):
                    if isinstance(just, SeedVarBound):
                        providers = ", ".join(str(p) for p in just.providers)
                        why = f"{just.variable.n3()} bound by position(s) {providers}"
                    else:
                        why = "web-safe"
                    lines.append(f"  {pos}. [{i}] {serialize_query(items[i])}  ({why})")
        for r in self.refusals:
            lines.append(f"conjunct {r.conjunct}: cannot place {r.subquery}: {r.reason}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Analysis
# ---------------------------------------------------------------------------


class _Analyzer:
    def __init__(self, limit: int):
        self.limit = limit

    def certify(self, q: Query) -> tuple[SafenessCertificate | None, list[Refusal]]:
        nf = rewrite_union_normal_form(q, self.limit)
        branches = union_branches(nf)
        logger.debug("normal form has %d conjunct(s)", len(branches))
        orders: list[ConjunctOrder] = []
        refusals: list[Refusal] = []
        for index, branch in enumerate(branches):
            items = and_items(branch)
            placed, justifications, blocked = self.order(items)
            if blocked:
                refusals.extend(
                    Refusal(index, serialize_query(items[i]), var, reason)
                    for i, var, reason in blocked
                )
            else:
                orders.append(ConjunctOrder(index, tuple(placed), tuple(justifications)))
        if refusals:
            return None, refusals
        return SafenessCertificate(nf, tuple(orders)), []

    def order(
        self, items: Sequence[Query]
    ) -> tuple[list[int], list[Justification], list[tuple[int, str | None, str]]]:
        placed: list[int] = []
        justifications: list[Justification] = []
        bound: set[Var] = set()
        remaining = list(range(len(items)))
        progress = True
        while remaining and progress:
            progress = False
            for i in remaining:
                just = self.admissible(items[i], bound, [items[j] for j in placed])
                if just is not None:
                    placed.append(i)
                    justifications.append(just)
                    bound |= sbvars_query(items[i])
                    remaining.remove(i)
                    progress = True
                    break
        blocked = [(i, *self.explain(items[i], bound)) for i in remaining]
        return placed, justifications, blocked

    def admissible(
        self, sub: Query, bound: set[Var], earlier: Sequence[Query] = ()
    ) -> Justification | None:
        if isinstance(sub, SeedVar):
            if sub.var not in bound:
                return None
            cert = self.certificate(sub.query)
            if cert is None:
                return None
            providers = tuple(k for k, q in enumerate(earlier) if sub.var in sbvars_query(q))
            return SeedVarBound(sub.var, providers, cert)
        if isinstance(sub, Basic):
            certs = []
            for nav in navsub_queries(sub.lpe):
                cert = self.certificate(nav.query)
                if cert is None:
                    return None
                certs.append(cert)
            return Safe(tuple(certs))
        if isinstance(sub, (Project, SeedUris)):
            cert = self.certificate(sub.query)
            return None if cert is None else Safe((cert,))
        # AND / UNION only occur here when called outside a normal form
        cert = self.certificate(sub)
        return None if cert is None else Safe((cert,))

    def certificate(self, q: Query) -> SafenessCertificate | None:
        return self.certify(q)[0]

    def explain(self, sub: Query, bound: set[Var]) -> tuple[str | None, str]:
        if isinstance(sub, SeedVar):
            if sub.var not in bound:
                return sub.var.name, (
                    f"{sub.var.n3()} is not strongly bound by any other subquery"
                )
            return sub.var.name, f"the query under SEED {sub.var.n3()} is not certified"
        if isinstance(sub, Basic):
            for nav in navsub_queries(sub.lpe):
                cert, refusals = self.certify(nav.query)
                if cert is None:
                    first = refusals[0]
                    return first.variable, (
                        f"the query of ({nav.var.n3()} : ...) is not certified: {first.reason}"
                    )
        _, refusals = self.certify(sub.query if isinstance(sub, (Project, SeedUris)) else sub)
        first = refusals[0] if refusals else None
        if first is None:
            return None, "not certified"
        return first.variable, f"nested query is not certified: {first.reason}"


def is_websafe_syntactic(q: Query, *, limit: int = DEFAULT_NORMAL_FORM_LIMIT) -> SafenessReport:
    """Try to certify *q* as Web-safe; raises NormalFormTooLarge past *limit*."""
    certificate, refusals = _Analyzer(limit).certify(q)
    if certificate is None:
        logger.debug("query not certified: %d refusal(s)", len(refusals))
        return SafenessReport(Verdict.NOT_CERTIFIED, None, tuple(refusals))
    logger.debug("query certified with %d conjunct order(s)", len(certificate.conjuncts))
    return SafenessReport(Verdict.CERTIFIED, certificate, ())


def is_lpe_websafe(l: Lpe, *, limit: int = DEFAULT_NORMAL_FORM_LIMIT) -> bool:
    """Whether every ``(?v : q)`` nested in *l* has a certified query."""
    if isinstance(l, NavSub):
        return _Analyzer(limit).certificate(l.query) is not None
    return all(is_lpe_websafe(child, limit=limit) for child in lpe_children(l))


def find_order(
    subqueries: Sequence[Query], *, limit: int = DEFAULT_NORMAL_FORM_LIMIT
) -> list[int] | None:
    """A placement order for the operands of a conjunction, or None."""
    placed, _, blocked = _Analyzer(limit).order(subqueries)
    return None if blocked else placed


def admissible(
    sub: Query, bound: set[Var], *, limit: int = DEFAULT_NORMAL_FORM_LIMIT
) -> bool:
    """Whether *sub* may follow subqueries that strongly bind *bound*."""
    return _Analyzer(limit).admissible(sub, bound) is not None


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def _valid_justification(
    item: Query,
    just: Justification,
    position: int,
    placed: Sequence[Query],
    limit: int,
) -> bool:
    if isinstance(just, SeedVarBound):
        if not isinstance(item, SeedVar) or item.var != just.variable:
            return False
        if not just.providers or any(not 0 <= p < position for p in just.providers):
            return False
        supplied: set[Var] = set()
        for p in just.providers:
            supplied |= sbvars_query(placed[p])
        if just.variable not in supplied:
            return False
        return validate_certificate(item.query, just.certificate, limit=limit)
    if isinstance(item, SeedVar):
        return False
    if isinstance(item, Basic):
        navs = list(navsub_queries(item.lpe))
        if len(navs) != len(just.subcertificates):
            return False
        return all(
            validate_certificate(nav.query, cert, limit=limit)
            for nav, cert in zip(navs, just.subcertificates)
        )
    if isinstance(item, (Project, SeedUris)):
        return len(just.subcertificates) == 1 and validate_certificate(
            item.query, just.subcertificates[0], limit=limit
        )
    return False


def validate_certificate(
    q: Query, c: SafenessCertificate, *, limit: int = DEFAULT_NORMAL_FORM_LIMIT
) -> bool:
    """Re-check every obligation of *c* against *q* from scratch."""
    try:
        nf = rewrite_union_normal_form(q, limit)
    except LdqlError:
        return False
    if c.normal_form != nf or not is_union_normal_form(c.normal_form):
        return False
    branches = union_branches(nf)
    if len(c.conjuncts) != len(branches):
        return False
    for expected, conj in enumerate(c.conjuncts):
        if conj.index != expected:
            return False
        items = and_items(branches[expected])
        if sorted(conj.order) != list(range(len(items))):
            return False
        if len(conj.justifications) != len(conj.order):
            return False
        placed = [items[i] for i in conj.order]
        for position, just in enumerate(conj.justifications):
            if not _valid_justification(placed[position], just, position, placed, limit):
                return False
    return True
