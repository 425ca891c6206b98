"""
Constructive steps of the caterpillar assembly.

- path_grow: induced path from a root vertex, or an anti-adjacent pair
- grow_bud: connected set with a prescribed closed-neighbourhood size
- attach_legs: turn a junior caterpillar into an induced T(h,d,t)
- fern_to_junior: read a junior caterpillar off a tall fern

Steps that can fail at desk scale return the anti-adjacent pair the
corresponding size bound was derived from, as a Certificate.
"""

import logging
from fractions import Fraction
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Tuple, Union

from .errors import InfeasibleError, InvariantViolation, PreconditionError
from .graph_core import (
    CaterpillarShape,
    ColouredGraph,
    Embedding,
    Graph,
    VertexSet,
    connected_components,
    make_caterpillar,
    split_components,
)
from .oracle import Certificate, is_induced_embedding, pair_certificate
from .rationals import Rational, ceil_fraction
from .structures import Bud, Fern, JuniorCaterpillar

logger = logging.getLogger(__name__)

Observer = Callable[[Dict[str, Any]], None]


class PathGrowResult(NamedTuple):
    """Exactly one of `path` and `pair` is set"""
    path: Optional[List[int]] = None
    pair: Optional[Tuple[VertexSet, VertexSet]] = None

    @property
    def is_pair(self) -> bool:
        return self.pair is not None


def _pair_from_candidates(g: Graph, c: VertexSet, delta: int) -> Optional[Tuple[VertexSet, VertexSet]]:
    """Anti-adjacent pair with both sides >= delta inside c, if its largest component is small"""
    comps = connected_components(g, c)
    largest = max(comps, key=len)
    if len(largest) > len(c) - delta:
        return None
    if len(largest) >= delta:
        return largest, c - largest
    # every component is below delta, so a balanced split leaves >= delta per side
    return split_components(g, c)


def path_grow(g: Graph, v: int, t: int, delta: int, within: Optional[VertexSet] = None) -> PathGrowResult:
    """Induced t-vertex path starting at v, or two anti-adjacent sets of size >= delta.

    Works in g[within] (all of g by default). Requires g[within] connected,
    maximum degree <= delta and more than (t+2)*delta vertices.
    """
    verts = frozenset(g.vertices()) if within is None else frozenset(within)
    if t < 1 or delta < 1:
        raise PreconditionError(f"path_grow needs t, delta >= 1, got t={t}, delta={delta}")
    if v not in verts:
        raise PreconditionError(f"root {v} is not in the working set")
    if len(verts) <= (t + 2) * delta:
        raise PreconditionError(f"path_grow needs more than {(t + 2) * delta} vertices, got {len(verts)}")
    if g.max_degree(verts) > delta:
        raise PreconditionError(f"maximum degree {g.max_degree(verts)} exceeds delta={delta}")
    if not g.is_connected(verts):
        raise PreconditionError("path_grow needs a connected graph")

    path = [v]
    previous_zone: VertexSet = frozenset()
    zone = (g.neighbours(v) & verts) | {v}
    while len(path) < t:
        rest = verts - zone
        if len(rest) >= 3 * delta:
            pair = _pair_from_candidates(g, rest, delta)
            if pair is not None:
                logger.debug(f"path_grow: anti-adjacent pair of sizes {len(pair[0])}, {len(pair[1])} after {len(path)} vertices")
                return PathGrowResult(pair=pair)
        comps = connected_components(g, rest)
        target = max(comps, key=len) if comps else frozenset()
        tip = path[-1]
        nxt = None
        # candidates must not touch v_1..v_{i-1}
        for w in sorted((g.neighbours(tip) & verts) - previous_zone):
            if g.neighbours(w) & target:
                nxt = w
                break
        if nxt is None:
            raise InvariantViolation(f"path_grow: no extension from {tip} toward a component of size {len(target)}")
        path.append(nxt)
        previous_zone = zone
        zone = zone | (g.neighbours(nxt) & verts) | {nxt}
    return PathGrowResult(path=path)


def grow_bud(g: Graph, pool: VertexSet, v: int, threshold: Rational,
             cap: Optional[Rational] = None) -> Union[Certificate, VertexSet]:
    """Grow a connected B inside pool, starting next to v, until |N[B]| >= threshold.

    If B reaches `cap` vertices first, (B, V minus N[B]) is returned as an
    anti_pair certificate instead.
    """
    pool = frozenset(pool)
    starts = sorted(g.neighbours(v) & pool)
    if not starts:
        raise PreconditionError(f"vertex {v} has no neighbour in the bud pool")
    threshold = Fraction(threshold)

    bud = {starts[0]}
    closed = set(g.neighbours(starts[0])) | bud
    while len(closed) < threshold:
        if cap is not None and len(bud) >= cap:
            return _saturated_pair(g, bud, closed)
        frontier = sorted((set().union(*(g.neighbours(b) for b in bud)) & pool) - bud)
        if not frontier:
            raise InfeasibleError(
                f"bud pool exhausted at |N[B]|={len(closed)} below threshold {threshold}",
                {"bud_size": len(bud), "closed_size": len(closed), "threshold": str(threshold)},
            )
        pick = next((w for w in frontier if g.neighbours(w) - closed), frontier[0])
        bud.add(pick)
        closed |= g.neighbours(pick)
    if cap is not None and len(bud) >= cap and len(closed) < g.n:
        return _saturated_pair(g, bud, closed)
    return frozenset(bud)


def _saturated_pair(g: Graph, bud: set, closed: set) -> Certificate:
    rest = set(g.vertices()) - closed
    if not rest:
        raise InfeasibleError("bud saturated the whole graph", {"bud_size": len(bud)})
    logger.debug(f"grow_bud: bud reached {len(bud)} vertices, emitting pair against {len(rest)} vertices")
    return pair_certificate(g, bud, rest)


def attach_legs(g: Graph, jc: JuniorCaterpillar, shape: CaterpillarShape, eps: Rational,
                observer: Optional[Observer] = None) -> Union[Certificate, Embedding]:
    """Induced T(h,d,t) built on jc's path, or an anti-adjacent pair certificate"""
    n = g.n
    eps = Fraction(eps)
    h, d, t = shape.h, shape.d, shape.t
    if g.max_degree() > eps * n:
        raise PreconditionError(f"maximum degree {g.max_degree()} exceeds eps*n = {eps * n}")
    if jc.h != h:
        raise PreconditionError(f"junior caterpillar has {jc.h} path vertices, shape needs {h}")

    template = make_caterpillar(shape)
    spine = {template.spine[i]: jc.path[i] for i in range(h)}
    if d == 0 or t == 0:
        return dict(sorted(spine.items()))
    if jc.d < d:
        raise PreconditionError(f"junior caterpillar has {jc.d} buds per path vertex, shape needs {d}")

    hdt = h * d * t
    slots = [(i, j) for i in range(h) for j in range(d)]
    spine_closed = g.closed_neighbourhood(jc.path)
    buds: List[VertexSet] = []
    cs: List[VertexSet] = []
    used_closed: set = set()
    for k, (i, j) in enumerate(slots, start=1):
        root = jc.path[i]
        threshold = 10 * hdt * 2 ** k * eps * n
        grown = grow_bud(g, jc.buds[i][j].members, root, threshold, cap=eps * n)
        if isinstance(grown, Certificate):
            return grown
        open_nb = g.neighbourhood(grown)
        c_k = open_nb - used_closed - spine_closed
        if observer:
            observer({"stage": "bud", "k": k, "threshold": threshold, "bud_size": len(grown),
                      "open_size": len(open_nb), "closed_size": len(open_nb | grown), "c_size": len(c_k),
                      "eps_n": eps * n, "hdt": hdt})
        if len(c_k) < 9 * hdt * eps * n:
            logger.debug(f"attach_legs: |C^{k}|={len(c_k)} below {9 * hdt * eps * n}")
            return _fallback_pair(g, grown, f"C^{k} too small")
        used_closed |= open_nb | grown
        buds.append(grown)
        cs.append(c_k)

    delta = max(1, ceil_fraction(eps * n))
    legs: Dict[int, List[int]] = {}
    blocked: set = set()
    for k in range(len(slots), 0, -1):
        i, j = slots[k - 1]
        root = jc.path[i]
        d_k = frozenset({root} | ((buds[k - 1] | cs[k - 1]) - blocked))
        if len(d_k) <= (t + 3) * delta or not g.is_connected(d_k):
            logger.debug(f"attach_legs: D^{k} of size {len(d_k)} unusable for a {t + 1}-vertex path")
            return _fallback_pair(g, buds[k - 1], f"D^{k} unusable")
        if observer:
            observer({"stage": "leg", "k": k, "d_size": len(d_k), "delta": delta})
        result = path_grow(g, root, t + 1, delta, within=d_k)
        if result.is_pair:
            a, b = result.pair
            return pair_certificate(g, a, b)
        leg = result.path[1:]
        legs[k] = leg
        blocked |= g.closed_neighbourhood(leg)

    embedding = dict(spine)
    for k, (i, j) in enumerate(slots, start=1):
        for pos, w in enumerate(template.legs[(i, j)]):
            embedding[w] = legs[k][pos]
    if not is_induced_embedding(g, template.graph, embedding):
        raise InvariantViolation(f"attach_legs produced a non-induced copy of {shape}")
    return dict(sorted(embedding.items()))


def _fallback_pair(g: Graph, bud: VertexSet, why: str) -> Certificate:
    rest = set(g.vertices()) - g.closed_neighbourhood(bud)
    if not rest:
        raise InfeasibleError(f"leg attachment failed ({why}) and N[B] covers the graph",
                              {"reason": why, "bud_size": len(bud)})
    return pair_certificate(g, bud, rest)


def fern_to_junior(cg: ColouredGraph, f: Fern, h: int, d: int) -> JuniorCaterpillar:
    """Read an (alpha,h,d)-junior caterpillar off a fern of arity d+1 and height >= h"""
    if f.arity != d + 1:
        raise PreconditionError(f"fern arity {f.arity} does not match d+1={d + 1}")
    if f.height < h:
        raise PreconditionError(f"fern height {f.height} is below h={h}")
    g = cg.graph
    below = f.subtree_heights()

    nodes = [0]
    for i in range(1, h + 1):
        kids = f.children(nodes[-1])
        # remaining depth needed below the chosen child
        nodes.append(next(c for c in kids if below[c] >= h - i))

    path = [min(f.buds[0].vertices)]
    for i in range(1, h):
        options = sorted(set(f.buds[nodes[i]].vertices) & g.neighbours(path[-1]))
        if not options:
            raise PreconditionError(f"node {nodes[i]} has no vertex adjacent to {path[-1]}")
        path.append(options[0])

    rows = []
    for i in range(h):
        siblings = [c for c in f.children(nodes[i]) if c != nodes[i + 1]]
        rows.append([Bud.of(f.buds[c].vertices, f.buds[c].witness_colour) for c in siblings])
    return JuniorCaterpillar(path=path, buds=rows)
