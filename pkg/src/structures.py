"""
Buds, ferns and junior caterpillars, each with a standalone validator.

Every validator recomputes from the host graph; stored witness colours are
an audit trail only. Validators return a `Verdict` naming the first failed
clause, checked in the order: shape of the structure, connectivity, bud
bound, colour compatibility, adjacency pattern.
"""

import logging
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence

from pydantic import BaseModel, Field

from .errors import DomainError
from .graph_core import PASS, ColouredGraph, Verdict, VertexSet, fail
from .rationals import Rational

logger = logging.getLogger(__name__)

ROOT_PARENT = -1


class Bud(BaseModel):
    """Connected vertex set plus the colour class its neighbourhood covers"""
    vertices: List[int]
    witness_colour: int

    @property
    def members(self) -> VertexSet:
        return frozenset(self.vertices)

    @classmethod
    def of(cls, vertices: Iterable[int], witness_colour: int) -> "Bud":
        return cls(vertices=sorted(vertices), witness_colour=witness_colour)


class Fern(BaseModel):
    """Rooted tree of buds; node 0 is the root and parents precede children"""
    parents: List[int] = Field(default_factory=lambda: [ROOT_PARENT])
    buds: List[Bud]
    arity: int

    @classmethod
    def single(cls, bud: Bud, arity: int) -> "Fern":
        return cls(parents=[ROOT_PARENT], buds=[bud], arity=arity)

    @classmethod
    def wrap(cls, root: Bud, subferns: Sequence["Fern"], arity: int) -> "Fern":
        """New root bud with the roots of `subferns` as its children"""
        parents = [ROOT_PARENT]
        buds = [root]
        for sub in subferns:
            offset = len(buds)
            parents.extend(0 if p == ROOT_PARENT else p + offset for p in sub.parents)
            buds.extend(sub.buds)
        return cls(parents=parents, buds=buds, arity=arity)

    @property
    def size(self) -> int:
        return len(self.buds)

    @property
    def root(self) -> Bud:
        return self.buds[0]

    def children(self, node: int) -> List[int]:
        return [c for c, p in enumerate(self.parents) if p == node]

    def depths(self) -> List[int]:
        out = [0] * len(self.parents)
        for node in range(1, len(self.parents)):
            out[node] = out[self.parents[node]] + 1
        return out

    @property
    def height(self) -> int:
        return max(self.depths(), default=0)

    def subtree_heights(self) -> List[int]:
        out = [0] * len(self.parents)
        for node in range(len(self.parents) - 1, 0, -1):
            parent = self.parents[node]
            out[parent] = max(out[parent], out[node] + 1)
        return out

    def vertex_set(self) -> VertexSet:
        out: set = set()
        for bud in self.buds:
            out |= bud.members
        return frozenset(out)


class JuniorCaterpillar(BaseModel):
    """Induced path v_1..v_h with an h x d matrix of private buds"""
    path: List[int]
    buds: List[List[Bud]]

    @property
    def h(self) -> int:
        return len(self.path)

    @property
    def d(self) -> int:
        return len(self.buds[0]) if self.buds else 0

    def all_buds(self) -> List[Bud]:
        return [bud for row in self.buds for bud in row]


def is_alpha_bud(cg: ColouredGraph, b: Iterable[int], alpha: Rational) -> Optional[int]:
    """Smallest j with |N(b) ∩ V_j| >= alpha |V_j| if g[b] is connected, else None"""
    b = frozenset(b)
    if not b:
        raise DomainError("A bud must be non-empty")
    g = cg.graph
    if not g.is_connected(b):
        return None
    reach = g.neighbourhood(b)
    alpha = Fraction(alpha)
    for j, cls in enumerate(cg.classes):
        # empty classes would satisfy any bound vacuously
        if cls and len(reach & cls) >= alpha * len(cls):
            return j
    return None


def is_colour_compatible(family: Iterable[Iterable[int]], cg: ColouredGraph) -> bool:
    seen: set = set()
    for s in family:
        colours = {cg.colour_of(v) for v in s}
        if len(colours) != 1 or None in colours:
            return False
        (colour,) = colours
        if colour in seen:
            return False
        seen.add(colour)
    return True


def _check_tree(f: Fern) -> Verdict:
    if not f.buds or len(f.parents) != len(f.buds):
        return fail("tree: parents and buds must be non-empty and of equal length")
    if f.parents[0] != ROOT_PARENT:
        return fail("tree: node 0 must be the root")
    for node, parent in enumerate(f.parents[1:], start=1):
        if not 0 <= parent < node:
            return fail(f"tree: node {node} has parent {parent}, expected an earlier node")
    if f.arity < 1:
        return fail(f"tree: arity must be >= 1, got {f.arity}")
    for node in range(len(f.parents)):
        kids = len(f.children(node))
        if kids not in (0, f.arity):
            return fail(f"tree: node {node} has {kids} children, arity is {f.arity}")
    return PASS


def _check_buds(cg: ColouredGraph, buds: Sequence[Bud], alpha: Rational, label) -> Verdict:
    g = cg.graph
    for idx, bud in enumerate(buds):
        if not bud.vertices:
            return fail(f"connectivity: {label(idx)} is empty")
        if any(not 0 <= v < g.n for v in bud.vertices):
            return fail(f"connectivity: {label(idx)} has vertices outside the graph")
        if not g.is_connected(bud.members):
            return fail(f"connectivity: {label(idx)} is disconnected")
    for idx, bud in enumerate(buds):
        if is_alpha_bud(cg, bud.members, alpha) is None:
            return fail(f"bud bound: {label(idx)} is not an alpha-bud for alpha={Fraction(alpha)}")
    return PASS


def validate_fern(cg: ColouredGraph, f: Fern, alpha: Rational) -> Verdict:
    verdict = _check_tree(f)
    if not verdict:
        return verdict
    verdict = _check_buds(cg, f.buds, alpha, lambda i: f"bud of node {i}")
    if not verdict:
        return verdict
    if not is_colour_compatible((b.vertices for b in f.buds), cg):
        return fail("compatibility: buds are not colour-compatible")

    g = cg.graph
    for s in range(len(f.buds)):
        for t in range(s + 1, len(f.buds)):
            if f.parents[t] == s:
                child = f.buds[t].members
                for v in f.buds[s].vertices:
                    if not g.neighbours(v) & child:
                        return fail(f"adjacency: vertex {v} of node {s} has no neighbour in child {t}")
            elif not g.anti_adjacent(f.buds[s].vertices, f.buds[t].members):
                return fail(f"adjacency: buds of nodes {s} and {t} are not anti-adjacent")
    return PASS


def grows_on(cg: ColouredGraph, f: Fern, z: Iterable[int]) -> bool:
    """z avoids every bud, misses every non-root bud and lies in N(root bud)"""
    z = frozenset(z)
    if not z:
        return True
    g = cg.graph
    if z & f.vertex_set():
        return False
    for bud in f.buds[1:]:
        if not g.anti_adjacent(bud.vertices, z):
            return False
    return z <= g.neighbourhood(f.root.vertices)


def validate_junior(cg: ColouredGraph, jc: JuniorCaterpillar, alpha: Rational, h: int, d: int) -> Verdict:
    g = cg.graph
    path = jc.path
    if len(path) != h:
        return fail(f"structure: path has {len(path)} vertices, expected {h}")
    if len(jc.buds) != h or any(len(row) != d for row in jc.buds):
        return fail(f"structure: bud matrix is not {h} x {d}")
    if len(set(path)) != len(path) or any(not 0 <= v < g.n for v in path):
        return fail("structure: path vertices must be distinct vertices of the graph")
    for i in range(h):
        for j in range(i + 1, h):
            if g.has_edge(path[i], path[j]) != (j == i + 1):
                return fail(f"structure: path is not induced at positions {i} and {j}")

    flat = jc.all_buds()
    verdict = _check_buds(cg, flat, alpha, lambda k: f"bud ({k // d},{k % d})")
    if not verdict:
        return verdict

    family = [b.vertices for b in flat] + [[v] for v in path]
    if not is_colour_compatible(family, cg):
        return fail("compatibility: buds and path vertices are not colour-compatible")

    for x in range(len(flat)):
        for y in range(x + 1, len(flat)):
            if not g.anti_adjacent(flat[x].vertices, flat[y].members):
                return fail(f"adjacency: buds ({x // d},{x % d}) and ({y // d},{y % d}) are not anti-adjacent")
    on_path = frozenset(path)
    for i, row in enumerate(jc.buds):
        for j, bud in enumerate(row):
            touched = g.neighbourhood(bud.vertices) & on_path
            if touched != {path[i]}:
                return fail(f"adjacency: N(bud ({i},{j})) meets the path in {sorted(touched)}, expected [{path[i]}]")
    return PASS
