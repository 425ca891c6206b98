"""
Graph vocabulary shared by every other module: immutable graphs, colourings,
and the caterpillar template T(h,d,t) with its recognition.
"""

import logging
import random
from collections import deque
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, model_validator

from .errors import DomainError, ParameterError, SizeError

logger = logging.getLogger(__name__)

VertexSet = FrozenSet[int]
Embedding = Dict[int, int]


class Verdict(NamedTuple):
    """Outcome of a validator: truthy iff ok, with the first failed clause"""
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


PASS = Verdict(True, "")


def fail(reason: str) -> Verdict:
    return Verdict(False, reason)


class Graph:
    """Immutable simple graph on vertices 0..n-1 with adjacency sets"""

    __slots__ = ("_adj", "_m")

    def __init__(self, n: int, edges: Iterable[Tuple[int, int]] = ()):
        if n < 0:
            raise ParameterError(f"Vertex count must be non-negative, got {n}")
        adj: List[set] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"Edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ParameterError(f"Self-loop at vertex {u}")
            adj[u].add(v)
            adj[v].add(u)
        self._adj: Tuple[FrozenSet[int], ...] = tuple(frozenset(a) for a in adj)
        self._m = sum(len(a) for a in adj) // 2

    @classmethod
    def _from_adjacency(cls, adj: Sequence[Iterable[int]]) -> "Graph":
        # trusted constructor: adj is already symmetric and loop-free
        g = cls.__new__(cls)
        g._adj = tuple(frozenset(a) for a in adj)
        g._m = sum(len(a) for a in g._adj) // 2
        return g

    @property
    def n(self) -> int:
        return len(self._adj)

    @property
    def edge_count(self) -> int:
        return self._m

    def vertices(self) -> range:
        return range(len(self._adj))

    def neighbours(self, v: int) -> FrozenSet[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def max_degree(self, within: Optional[Iterable[int]] = None) -> int:
        if within is None:
            return max((len(a) for a in self._adj), default=0)
        members = within if isinstance(within, (set, frozenset)) else frozenset(within)
        return max((len(self._adj[v] & members) for v in members), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def edges(self) -> List[Tuple[int, int]]:
        """Edges (u, v) with u < v in lexicographic order"""
        return [(u, v) for u in range(self.n) for v in sorted(self._adj[u]) if u < v]

    def neighbourhood(self, s: Iterable[int]) -> VertexSet:
        """N(S): every vertex with a neighbour in S"""
        out: set = set()
        for v in s:
            out |= self._adj[v]
        return frozenset(out)

    def closed_neighbourhood(self, s: Iterable[int]) -> VertexSet:
        """N[S] = N(S) ∪ S"""
        s = frozenset(s)
        return self.neighbourhood(s) | s

    def is_connected(self, s: Optional[Iterable[int]] = None) -> bool:
        members = frozenset(self.vertices() if s is None else s)
        if not members:
            return False
        start = min(members)
        return len(_bfs(self, start, members)) == len(members)

    def anti_adjacent(self, a: Iterable[int], b: Iterable[int]) -> bool:
        b = frozenset(b)
        return all(not (self._adj[u] & b) for u in a)

    def fully_adjacent(self, a: Iterable[int], b: Iterable[int]) -> bool:
        b = frozenset(b)
        return all(b <= self._adj[u] for u in a)

    def induced_subgraph(self, vertices: Sequence[int]) -> Tuple["Graph", List[int]]:
        """G[S] relabelled 0..|S|-1 in the given order, plus the map back to host ids"""
        host_of = list(vertices)
        local = {v: i for i, v in enumerate(host_of)}
        if len(local) != len(host_of):
            raise ParameterError("Duplicate vertices in induced_subgraph")
        adj = [[local[w] for w in self._adj[v] if w in local] for v in host_of]
        return Graph._from_adjacency(adj), host_of

    def complement(self) -> "Graph":
        return complement(self)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self._adj == other._adj

    def __hash__(self) -> int:
        return hash(self._adj)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self._m})"


def complement(g: Graph) -> Graph:
    everyone = frozenset(g.vertices())
    return Graph._from_adjacency([everyone - g.neighbours(v) - {v} for v in g.vertices()])


def _bfs(g: Graph, start: int, members: FrozenSet[int]) -> List[int]:
    seen = {start}
    order = [start]
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in sorted(g.neighbours(u) & members):
            if w not in seen:
                seen.add(w)
                order.append(w)
                queue.append(w)
    return order


def bfs_order(g: Graph, start: int, s: Iterable[int]) -> List[int]:
    """Breadth-first order of g[s] from start, neighbours in ascending id"""
    members = frozenset(s)
    if start not in members:
        raise ParameterError(f"BFS start {start} is not in the vertex set")
    return _bfs(g, start, members)


def connected_components(g: Graph, s: Optional[Iterable[int]] = None) -> List[VertexSet]:
    """Components of g[s], ordered by their smallest vertex"""
    members = frozenset(g.vertices() if s is None else s)
    seen: set = set()
    out: List[VertexSet] = []
    for v in sorted(members):
        if v in seen:
            continue
        comp = frozenset(_bfs(g, v, members))
        seen |= comp
        out.append(comp)
    return out


def largest_component(g: Graph, s: Iterable[int]) -> VertexSet:
    """Largest component of g[s]; ties go to the smallest minimum id"""
    best: VertexSet = frozenset()
    for comp in connected_components(g, s):
        if len(comp) > len(best):
            best = comp
    return best


def split_components(g: Graph, s: Iterable[int]) -> Optional[Tuple[VertexSet, VertexSet]]:
    """Balanced anti-adjacent split of g[s] along its components.

    Components go largest first onto the currently smaller side, so the
    sides differ by at most the largest component. None if g[s] is connected.
    """
    return balanced_split(connected_components(g, s))


def balanced_split(comps: List[VertexSet]) -> Optional[Tuple[VertexSet, VertexSet]]:
    if len(comps) < 2:
        return None
    left: set = set()
    right: set = set()
    for comp in sorted(comps, key=lambda c: (-len(c), min(c))):
        if len(left) <= len(right):
            left |= comp
        else:
            right |= comp
    return frozenset(left), frozenset(right)


def complement_components(g: Graph) -> List[VertexSet]:
    """Components of the complement of g without building it"""
    unvisited = set(g.vertices())
    out: List[VertexSet] = []
    while unvisited:
        start = min(unvisited)
        unvisited.discard(start)
        comp = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            reached = unvisited - g.neighbours(u)
            unvisited -= reached
            comp.extend(reached)
            queue.extend(reached)
        out.append(frozenset(comp))
    return out


class ColouredGraph:
    """A graph with an ordered family of disjoint colour classes V_0..V_{l-1}"""

    __slots__ = ("graph", "classes", "_colour")

    def __init__(self, graph: Graph, classes: Sequence[Iterable[int]]):
        self.graph = graph
        self.classes: Tuple[VertexSet, ...] = tuple(frozenset(c) for c in classes)
        colour: Dict[int, int] = {}
        for i, cls in enumerate(self.classes):
            for v in cls:
                if not 0 <= v < graph.n:
                    raise ParameterError(f"Colour class {i} holds vertex {v} outside the graph")
                if v in colour:
                    raise ParameterError(f"Vertex {v} lies in classes {colour[v]} and {i}")
                colour[v] = i
        self._colour = colour

    @property
    def ell(self) -> int:
        return len(self.classes)

    def colour_of(self, v: int) -> Optional[int]:
        return self._colour.get(v)

    def covered(self) -> VertexSet:
        return frozenset(self._colour)

    def is_equipartition(self) -> bool:
        return len({len(c) for c in self.classes}) <= 1

    def __repr__(self) -> str:
        return f"ColouredGraph(n={self.graph.n}, sizes={[len(c) for c in self.classes]})"


def equipartition(g: Graph, ell: int, seed: int) -> ColouredGraph:
    """Seeded equipartition into ell classes of floor(n/ell) vertices.

    Ids are shuffled with `seed`; the n mod ell vertices at the end of the
    shuffled order are discarded and the rest is cut into consecutive blocks.
    """
    if ell < 1:
        raise ParameterError(f"Need at least one colour class, got {ell}")
    if g.n < ell:
        raise SizeError(f"Cannot split {g.n} vertices into {ell} non-empty classes")
    order = list(g.vertices())
    random.Random(seed).shuffle(order)
    size = g.n // ell
    dropped = g.n - size * ell
    if dropped:
        logger.debug(f"equipartition discards {dropped} vertices: {sorted(order[size * ell:])}")
    return ColouredGraph(g, [order[i * size:(i + 1) * size] for i in range(ell)])


class CaterpillarShape(BaseModel):
    """Parameters (h, d, t) of the template caterpillar T(h,d,t).

    h spine vertices, d legs per spine vertex, t vertices per leg. Either
    d, t >= 1, or d = t = 0 (the bare spine; (1,0,0) is a single vertex).
    """
    model_config = ConfigDict(frozen=True)

    h: int
    d: int
    t: int

    @model_validator(mode="after")
    def _check_parameters(self) -> "CaterpillarShape":
        if self.h < 1:
            raise ValueError(f"spine length h must be >= 1, got {self.h}")
        if not ((self.d >= 1 and self.t >= 1) or (self.d == 0 and self.t == 0)):
            raise ValueError(f"need d,t >= 1 or d = t = 0, got d={self.d}, t={self.t}")
        return self

    @classmethod
    def parse(cls, text: str) -> "CaterpillarShape":
        """Parse 'h,d,t'"""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ParameterError(f"Shape must look like 'h,d,t', got {text!r}")
        try:
            h, d, t = (int(p) for p in parts)
            return cls(h=h, d=d, t=t)
        except ValueError as e:
            raise ParameterError(f"Invalid shape {text!r}: {e}") from e

    @property
    def vertex_count(self) -> int:
        return self.h + self.h * self.d * self.t

    @property
    def leg_count(self) -> int:
        return self.h * self.d

    def __str__(self) -> str:
        return f"T({self.h},{self.d},{self.t})"


class LabeledCaterpillar(BaseModel):
    """Canonical labelled T(h,d,t): spine v_0..v_{h-1}, legs P_(i,j) from the attachment end"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    shape: CaterpillarShape
    graph: Graph
    spine: Tuple[int, ...]
    legs: Dict[Tuple[int, int], Tuple[int, ...]]


@lru_cache(maxsize=256)
def _template_parts(shape: CaterpillarShape) -> Tuple[Graph, Tuple[int, ...], Tuple[Tuple[Tuple[int, int], Tuple[int, ...]], ...]]:
    h, d, t = shape.h, shape.d, shape.t
    spine = tuple(range(h))
    edges = [(i, i + 1) for i in range(h - 1)]
    legs = []
    nxt = h
    for i in range(h):
        for j in range(d):
            leg = tuple(range(nxt, nxt + t))
            nxt += t
            legs.append(((i, j), leg))
            edges.append((spine[i], leg[0]))
            edges.extend(zip(leg, leg[1:]))
    return Graph(nxt, edges), spine, tuple(legs)


def make_caterpillar(shape: CaterpillarShape) -> LabeledCaterpillar:
    """Build T(h,d,t): spine first, then legs in (i,j) order, attachment end first"""
    graph, spine, legs = _template_parts(shape)
    # the cached parts are immutable; each caller gets its own legs dict
    return LabeledCaterpillar(shape=shape, graph=graph, spine=spine, legs=dict(legs))


class CaterpillarMatch(NamedTuple):
    """A dominating shape and an induced embedding of the input into its template"""
    shape: CaterpillarShape
    embedding: Embedding


def _decompose(g: Graph) -> Optional[Tuple[List[int], List[List[List[int]]]]]:
    """Spine and per-spine-vertex legs of a caterpillar, None otherwise.

    The spine is the path between the two farthest-apart vertices of degree
    >= 3; for paths it is the smallest-id endpoint.
    """
    if g.n == 0 or g.edge_count != g.n - 1 or not g.is_connected():
        return None
    if g.n == 1:
        return [0], [[]]
    branch = [v for v in g.vertices() if g.degree(v) >= 3]
    if not branch:
        spine = [min(v for v in g.vertices() if g.degree(v) <= 1)]
    else:
        y = _farthest(g, branch[0], branch)
        z, parent = _farthest_with_parents(g, y, branch)
        spine = [z]
        while spine[-1] != y:
            spine.append(parent[spine[-1]])
        spine.reverse()
        on_spine = set(spine)
        if any(v not in on_spine for v in branch):
            return None
    on_spine = set(spine)
    legs: List[List[List[int]]] = []
    for s in spine:
        here: List[List[int]] = []
        for w in sorted(g.neighbours(s) - on_spine):
            leg, prev, cur = [], s, w
            while True:
                leg.append(cur)
                ahead = g.neighbours(cur) - {prev}
                if not ahead:
                    break
                prev, cur = cur, min(ahead)
            here.append(leg)
        legs.append(here)
    return spine, legs


def _distances(g: Graph, source: int) -> Tuple[Dict[int, int], Dict[int, int]]:
    dist = {source: 0}
    parent: Dict[int, int] = {}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in sorted(g.neighbours(u)):
            if w not in dist:
                dist[w] = dist[u] + 1
                parent[w] = u
                queue.append(w)
    return dist, parent


def _farthest(g: Graph, source: int, targets: Sequence[int]) -> int:
    dist, _ = _distances(g, source)
    return max(targets, key=lambda v: (dist[v], -v))


def _farthest_with_parents(g: Graph, source: int, targets: Sequence[int]) -> Tuple[int, Dict[int, int]]:
    dist, parent = _distances(g, source)
    return max(targets, key=lambda v: (dist[v], -v)), parent


def is_caterpillar(g: Graph) -> Optional[CaterpillarMatch]:
    """Shape and induced embedding into T(h,d,t) if g is a caterpillar"""
    parts = _decompose(g)
    if parts is None:
        return None
    spine, legs = parts
    shape = _shape_of(spine, legs)
    template = make_caterpillar(shape)
    embedding: Embedding = {}
    for i, s in enumerate(spine):
        embedding[s] = template.spine[i]
        for j, leg in enumerate(legs[i]):
            for pos, v in enumerate(leg):
                embedding[v] = template.legs[(i, j)][pos]
    return CaterpillarMatch(shape, dict(sorted(embedding.items())))


def _shape_of(spine: List[int], legs: List[List[List[int]]]) -> CaterpillarShape:
    if len(spine) == 1 and not legs[0]:
        return CaterpillarShape(h=1, d=0, t=0)
    d = max(len(here) for here in legs)
    t = max(len(leg) for here in legs for leg in here)
    return CaterpillarShape(h=len(spine), d=d, t=t)


def shape_for(caterpillar: Union[LabeledCaterpillar, Graph]) -> CaterpillarShape:
    """Some (h,d,t) whose template contains the input as an induced subgraph"""
    if isinstance(caterpillar, LabeledCaterpillar):
        return caterpillar.shape
    match = is_caterpillar(caterpillar)
    if match is None:
        raise DomainError(f"{caterpillar!r} is not a caterpillar")
    return match.shape
