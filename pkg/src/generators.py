"""
Seeded instance factory with planted answers.

Every generator is a pure function of its parameters and seed. Planted
generators return the known certificate (the "sidecar") alongside the graph.
"""

import logging
import random
from fractions import Fraction
from typing import Callable, Dict, NamedTuple, Optional

import networkx as nx

from .errors import ParameterError
from .graph_core import CaterpillarShape, Graph, make_caterpillar
from .oracle import Certificate, pair_certificate, pattern_certificate
from .rationals import Rational

logger = logging.getLogger(__name__)


class GeneratedInstance(NamedTuple):
    graph: Graph
    sidecar: Optional[Certificate] = None


def _check_probability(p: Rational) -> Fraction:
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ParameterError(f"edge probability must lie in [0, 1], got {p}")
    return p


def _gnp_edges(n: int, p: Fraction, seed: int) -> set:
    nxg = nx.gnp_random_graph(n, float(p), seed=seed)
    return {(min(u, v), max(u, v)) for u, v in nxg.edges()}


def gnp(n: int, p: Rational, seed: int) -> GeneratedInstance:
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    return GeneratedInstance(Graph(n, _gnp_edges(n, _check_probability(p), seed)))


def bounded_degree(n: int, delta: int, seed: int) -> GeneratedInstance:
    """Random delta-regular graph; with n*delta odd the last vertex stays isolated"""
    if n < 1 or delta < 0 or delta >= n:
        raise ParameterError(f"need n >= 1 and 0 <= delta < n, got n={n}, delta={delta}")
    size = n if (n * delta) % 2 == 0 else n - 1
    if delta >= size and delta > 0:
        raise ParameterError(f"cannot build a {delta}-regular graph on {size} vertices")
    nxg = nx.random_regular_graph(delta, size, seed=seed)
    return GeneratedInstance(Graph(n, nxg.edges()))


def planted_caterpillar(n: int, shape: CaterpillarShape, p: Rational, seed: int) -> GeneratedInstance:
    """G(n,p) with an induced T(h,d,t) planted on random vertices"""
    template = make_caterpillar(shape)
    if n < template.graph.n:
        raise ParameterError(f"{shape} needs {template.graph.n} vertices, n={n}")
    edges = _gnp_edges(n, _check_probability(p), seed)
    rng = random.Random(seed)
    hosts = rng.sample(range(n), template.graph.n)
    chosen = set(hosts)
    edges = {(u, v) for u, v in edges if not (u in chosen and v in chosen)}
    edges |= {(min(hosts[a], hosts[b]), max(hosts[a], hosts[b])) for a, b in template.graph.edges()}
    embedding = dict(enumerate(hosts))
    return GeneratedInstance(Graph(n, edges), pattern_certificate(shape, embedding))


def planted_bipartite_hole(n: int, size: int, p: Rational, seed: int) -> GeneratedInstance:
    """G(n,p) with all edges removed between two random disjoint sets of `size` vertices"""
    if size < 1 or 2 * size > n:
        raise ParameterError(f"need 1 <= size <= n/2, got size={size}, n={n}")
    edges = _gnp_edges(n, _check_probability(p), seed)
    rng = random.Random(seed)
    picked = rng.sample(range(n), 2 * size)
    a, b = set(picked[:size]), set(picked[size:])
    edges = {(u, v) for u, v in edges if not ((u in a and v in b) or (u in b and v in a))}
    g = Graph(n, edges)
    return GeneratedInstance(g, pair_certificate(g, a, b, "anti_pair"))


def two_cliques(n: int, seed: int) -> GeneratedInstance:
    """Disjoint cliques on floor(n/2) and ceil(n/2) shuffled vertices"""
    if n < 2:
        raise ParameterError(f"two_cliques needs n >= 2, got {n}")
    labels = list(range(n))
    random.Random(seed).shuffle(labels)
    a, b = labels[: n // 2], labels[n // 2:]
    edges = [(u, v) for side in (a, b) for i, u in enumerate(side) for v in side[i + 1:]]
    g = Graph(n, edges)
    return GeneratedInstance(g, pair_certificate(g, a, b, "anti_pair"))


GENERATORS: Dict[str, Callable[..., GeneratedInstance]] = {
    "gnp": gnp,
    "bounded_degree": bounded_degree,
    "planted_caterpillar": planted_caterpillar,
    "planted_bipartite_hole": planted_bipartite_hole,
    "two_cliques": two_cliques,
}


def generate(name: str, n: int, seed: int, p: Rational = Fraction(1, 2), delta: int = 3,
             shape: Optional[CaterpillarShape] = None, size: Optional[int] = None) -> GeneratedInstance:
    """Dispatch by generator name with the CLI's parameter set"""
    if name == "gnp":
        return gnp(n, p, seed)
    if name == "bounded_degree":
        return bounded_degree(n, delta, seed)
    if name == "planted_caterpillar":
        if shape is None:
            raise ParameterError("planted_caterpillar needs a shape")
        return planted_caterpillar(n, shape, p, seed)
    if name == "planted_bipartite_hole":
        return planted_bipartite_hole(n, size if size is not None else max(1, n // 4), p, seed)
    if name == "two_cliques":
        return two_cliques(n, seed)
    raise ParameterError(f"unknown generator {name!r}; choose from {', '.join(GENERATORS)}")
