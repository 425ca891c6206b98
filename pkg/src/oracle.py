"""
Ground-truth searches and the certificate verifier.

Everything the pipeline emits passes through `verify_certificate` before it
leaves the process, so this module depends only on graph-core.
"""

import logging
from fractions import Fraction
from itertools import permutations
from typing import Dict, Iterable, List, Literal, NamedTuple, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .errors import MalformedCertificateError, SizeError
from .graph_core import (
    CaterpillarShape,
    Embedding,
    Graph,
    Verdict,
    VertexSet,
    PASS,
    fail,
    make_caterpillar,
)
from .rationals import FractionField

logger = logging.getLogger(__name__)

NAIVE_HOST_LIMIT = 10
BRUTEFORCE_PAIR_LIMIT = 20

CertificateKind = Literal["anti_pair", "full_pair", "induced_pattern", "induced_pattern_complement"]
PAIR_KINDS = ("anti_pair", "full_pair")
PATTERN_KINDS = ("induced_pattern", "induced_pattern_complement")


class Certificate(BaseModel):
    """Machine-checkable witness of one branch of the dichotomy"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: CertificateKind
    set_a: List[int] = Field(default_factory=list)
    set_b: List[int] = Field(default_factory=list)
    shape: Optional[CaterpillarShape] = None
    embedding: Optional[Dict[int, int]] = None
    fraction_a: FractionField = Fraction(0)
    fraction_b: FractionField = Fraction(0)

    @property
    def is_pair(self) -> bool:
        return self.kind in PAIR_KINDS


def pair_certificate(g: Graph, a: Iterable[int], b: Iterable[int], kind: str = "anti_pair") -> Certificate:
    """Pair certificate with sorted sides and fractions against g.n"""
    a, b = sorted(a), sorted(b)
    n = max(g.n, 1)
    return Certificate(kind=kind, set_a=a, set_b=b,
                       fraction_a=Fraction(len(a), n), fraction_b=Fraction(len(b), n))


def pattern_certificate(shape: CaterpillarShape, embedding: Embedding, complemented: bool = False) -> Certificate:
    kind = "induced_pattern_complement" if complemented else "induced_pattern"
    return Certificate(kind=kind, shape=shape, embedding=dict(sorted(embedding.items())))


def _search_order(pattern: Graph) -> List[int]:
    # highest degree first, then keep the order connected where possible
    remaining = set(pattern.vertices())
    order: List[int] = []
    placed: set = set()
    while remaining:
        v = max(remaining, key=lambda u: (len(pattern.neighbours(u) & placed), pattern.degree(u), -u))
        order.append(v)
        placed.add(v)
        remaining.discard(v)
    return order


class SearchOutcome(NamedTuple):
    embedding: Optional[Embedding]
    nodes: int
    exhausted: bool


class _BudgetExhausted(Exception):
    pass


def find_induced_bounded(host: Graph, pattern: Graph, budget: Optional[int] = None) -> SearchOutcome:
    """Backtracking induced-subgraph search that gives up after `budget` nodes.

    `exhausted` is True when the budget ran out before the search finished,
    in which case a None embedding means "unknown" rather than "absent".
    """
    if pattern.n > host.n:
        return SearchOutcome(None, 0, False)
    if pattern.n == 0:
        return SearchOutcome({}, 0, False)

    order = _search_order(pattern)
    host_ids = list(host.vertices())
    mapping: Dict[int, int] = {}
    used: set = set()
    nodes = 0

    def candidates(p: int) -> Iterable[int]:
        anchors = [q for q in pattern.neighbours(p) if q in mapping]
        if anchors:
            pool = set(host.neighbours(mapping[anchors[0]]))
            for q in anchors[1:]:
                pool &= host.neighbours(mapping[q])
            return sorted(pool)
        return host_ids

    def consistent(p: int, x: int) -> bool:
        if x in used or host.degree(x) < pattern.degree(p):
            return False
        for q, y in mapping.items():
            if pattern.has_edge(p, q) != host.has_edge(x, y):
                return False
        return True

    def extend(depth: int) -> bool:
        nonlocal nodes
        if depth == len(order):
            return True
        p = order[depth]
        for x in candidates(p):
            if not consistent(p, x):
                continue
            nodes += 1
            if budget is not None and nodes > budget:
                raise _BudgetExhausted()
            mapping[p] = x
            used.add(x)
            if extend(depth + 1):
                return True
            del mapping[p]
            used.discard(x)
        return False

    try:
        found = extend(0)
    except _BudgetExhausted:
        logger.debug(f"Induced search stopped after {budget} nodes")
        return SearchOutcome(None, nodes, True)
    return SearchOutcome(dict(sorted(mapping.items())) if found else None, nodes, False)


def find_induced(host: Graph, pattern: Graph) -> Optional[Embedding]:
    """Some induced embedding pattern -> host, or None; deterministic"""
    return find_induced_bounded(host, pattern).embedding


def find_induced_naive(host: Graph, pattern: Graph) -> Optional[Embedding]:
    """Exhaustive enumeration of injective maps (host n <= 10)"""
    if host.n > NAIVE_HOST_LIMIT:
        raise SizeError(f"find_induced_naive handles hosts up to {NAIVE_HOST_LIMIT} vertices, got {host.n}")
    if pattern.n > host.n:
        return None
    pairs = [(p, q) for p in pattern.vertices() for q in pattern.vertices() if p < q]
    for image in permutations(host.vertices(), pattern.n):
        if all(pattern.has_edge(p, q) == host.has_edge(image[p], image[q]) for p, q in pairs):
            return dict(enumerate(image))
    return None


def is_induced_embedding(host: Graph, pattern: Graph, embedding: Embedding) -> bool:
    return _check_embedding(host, pattern, embedding).ok


def _check_embedding(host: Graph, pattern: Graph, embedding: Embedding) -> Verdict:
    if set(embedding) != set(pattern.vertices()):
        return fail(f"embedding covers {len(embedding)} of {pattern.n} pattern vertices")
    images = list(embedding.values())
    if len(set(images)) != len(images):
        return fail("embedding is not injective")
    for p in pattern.vertices():
        for q in range(p + 1, pattern.n):
            x, y = embedding[p], embedding[q]
            if pattern.has_edge(p, q) and not host.has_edge(x, y):
                return fail(f"missing edge ({min(x, y)},{max(x, y)})")
            if not pattern.has_edge(p, q) and host.has_edge(x, y):
                return fail(f"unexpected edge ({min(x, y)},{max(x, y)})")
    return PASS


def max_anti_pair_bruteforce(g: Graph) -> Optional[Tuple[VertexSet, VertexSet]]:
    """Anti-adjacent pair maximising min(|A|, |B|), exhaustive for n <= 20.

    For a fixed A the best partner is V minus N[A], so enumerating every A
    covers every pair.
    """
    n = g.n
    if n > BRUTEFORCE_PAIR_LIMIT:
        raise SizeError(f"max_anti_pair_bruteforce handles up to {BRUTEFORCE_PAIR_LIMIT} vertices, got {n}")
    full = (1 << n) - 1
    closed_bits = [(1 << v) | sum(1 << w for w in g.neighbours(v)) for v in g.vertices()]
    closed = [0] * (1 << n)
    best_value, best = 0, None
    for mask in range(1, 1 << n):
        low = mask & -mask
        closed[mask] = closed[mask ^ low] | closed_bits[low.bit_length() - 1]
        rest = full & ~closed[mask]
        if not rest:
            continue
        value = min(bin(mask).count("1"), bin(rest).count("1"))
        if value > best_value:
            best_value, best = value, (mask, rest)
    if best is None:
        return None
    return _bits_to_set(best[0]), _bits_to_set(best[1])


def _bits_to_set(mask: int) -> VertexSet:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def verify_certificate(g0: Graph, cert: Certificate) -> Verdict:
    """Re-check a certificate against g0 exactly; reason names the first violation"""
    _check_ids(g0, cert)
    if cert.kind in PAIR_KINDS:
        return _verify_pair(g0, cert)
    return _verify_pattern(g0, cert)


def _check_ids(g0: Graph, cert: Certificate) -> None:
    for name, ids in (("set_a", cert.set_a), ("set_b", cert.set_b),
                      ("embedding", (cert.embedding or {}).values())):
        for v in ids:
            if not 0 <= v < g0.n:
                raise MalformedCertificateError(f"{name} holds vertex {v}, host has {g0.n} vertices")
    if cert.kind in PATTERN_KINDS and (cert.shape is None or cert.embedding is None):
        raise MalformedCertificateError(f"{cert.kind} certificate needs both shape and embedding")


def _verify_pair(g0: Graph, cert: Certificate) -> Verdict:
    a, b = cert.set_a, cert.set_b
    if not a or not b:
        return fail("pair sides must be non-empty")
    if len(set(a)) != len(a) or len(set(b)) != len(b):
        return fail("pair side lists a vertex twice")
    if set(a) & set(b):
        return fail(f"sides share vertex {min(set(a) & set(b))}")
    want_edges = cert.kind == "full_pair"
    for u in sorted(a):
        for v in sorted(b):
            if g0.has_edge(u, v) != want_edges:
                word = "missing" if want_edges else "unexpected"
                return fail(f"{word} edge ({min(u, v)},{max(u, v)})")
    n = max(g0.n, 1)
    if cert.fraction_a != Fraction(len(a), n) or cert.fraction_b != Fraction(len(b), n):
        return fail(f"fractions {cert.fraction_a}, {cert.fraction_b} do not match side sizes over n={g0.n}")
    return PASS


def _verify_pattern(g0: Graph, cert: Certificate) -> Verdict:
    if cert.set_a or cert.set_b:
        return fail("pattern certificates carry no pair sides")
    template = make_caterpillar(cert.shape).graph
    # a copy of T in the complement of g0 is a copy of complement(T) in g0
    if cert.kind == "induced_pattern_complement":
        verdict = _check_embedding(g0, template.complement(), cert.embedding)
        return verdict if verdict else fail(f"{verdict.reason} (complement pattern)")
    return _check_embedding(g0, template, cert.embedding)
