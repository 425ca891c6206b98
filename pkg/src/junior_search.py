"""
Search for an (alpha,h,d)-junior caterpillar in a coloured graph.

The search keeps, per active colour i, a working set W_i inside V_i and a
family of ferns growing on W_i. Each step spends one active colour a: a
connected set A inside W_a becomes the root bud of a new fern (over the
ferns of family a, if it had d+1 of them) that grows on W_b for the colour
b whose working set A dominates by a third. The loop stops once every
active family holds between 1 and d ferns, or a single colour remains; a
tall fern is then read off directly, otherwise the search recurses with
d-1 on the surviving working sets.

Whenever a size bound that cleanness would guarantee fails, the
anti-adjacent pair it was derived from is returned instead.
"""

import json
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Union

from pydantic import BaseModel

from .algorithms import fern_to_junior
from .errors import InfeasibleError, InvariantViolation, ParameterError
from .graph_core import ColouredGraph, VertexSet, bfs_order, largest_component, split_components
from .oracle import Certificate, pair_certificate
from .rationals import Rational
from .structures import Bud, Fern, JuniorCaterpillar, is_alpha_bud, validate_junior

logger = logging.getLogger(__name__)
trace_logger = logging.getLogger(__name__ + ".trace")

# exponents beyond this are reported but never expanded into integers
MATERIALISE_LIMIT = 50_000


def level_ell(h: int, d: int) -> int:
    """Colour count needed at recursion depth d: l(h,0) = h+2, l(h,d) = h + l(h,d-1)((d+1)^(h+1)+1)"""
    ell = h + 2
    for level in range(1, d + 1):
        ell = h + ell * ((level + 1) ** (h + 1) + 1)
    return ell


class LevelConstants(BaseModel):
    """Constants of one recursion level; alpha = 3^-three_exponent / 10^ten_exponent"""
    d: int
    ell: int
    three_exponent: int
    ten_exponent: int

    @property
    def materialisable(self) -> bool:
        return self.three_exponent <= MATERIALISE_LIMIT

    @property
    def alpha(self) -> Fraction:
        if not self.materialisable:
            raise ParameterError(f"alpha = 3^-{self.three_exponent}/10^{self.ten_exponent} is too small to expand")
        return Fraction(1, 3 ** self.three_exponent * 10 ** self.ten_exponent)


def level_table(h: int, d: int) -> List[LevelConstants]:
    """Levels d' = 0..d; alpha(h,d') = 3^-l(h,d') alpha(h,d'-1) / 10 with alpha(h,-1) = 1"""
    out = []
    three = 0
    for level in range(d + 1):
        ell = level_ell(h, level)
        three += ell
        out.append(LevelConstants(d=level, ell=ell, three_exponent=three, ten_exponent=level + 1))
    return out


class Level(NamedTuple):
    ell: int
    alpha: Fraction


def schedule_levels(h: int, d: int) -> List[Level]:
    return [Level(c.ell, c.alpha) for c in level_table(h, d)]


def scaled_levels(h: int, d: int, ell: int, alpha: Rational) -> List[Level]:
    """Levels for an overridden (ell, alpha): lower levels keep alpha and shrink ell
    by the same factor the colour-count recurrence grows it.

    No level drops below the h+2 colours a d = 0 search needs to reach height h.
    """
    levels = [Level(ell, Fraction(alpha))]
    for level in range(d, 0, -1):
        below = max(h + 2, (levels[0].ell - h) // ((level + 1) ** (h + 1) + 1))
        levels.insert(0, Level(below, Fraction(alpha)))
    return levels


@dataclass
class SearchState:
    """Working sets and fern families of one search invocation"""
    k: int
    active: List[int]
    working: Dict[int, VertexSet]
    families: Dict[int, List[Fern]]
    depth: int = 0
    last_root: Optional[VertexSet] = None

    @property
    def bud_count(self) -> int:
        return sum(f.size for ferns in self.families.values() for f in ferns)

    def snapshot(self) -> Dict[str, Any]:
        return {
            "depth": self.depth,
            "k": self.k,
            "active": list(self.active),
            "working_sizes": {str(i): len(self.working[i]) for i in self.active},
            "working": {str(i): sorted(self.working[i]) for i in self.active},
            "families": {str(i): [f.size for f in self.families[i]] for i in self.active},
            "ferns": {str(i): [f.model_dump() for f in self.families[i]] for i in self.active},
            "buds": self.bud_count,
        }


SearchObserver = Callable[[ColouredGraph, SearchState, int, Fraction], None]


def junior_search(cg: ColouredGraph, h: int, d: int, alpha: Rational,
                  levels: Optional[List[Level]] = None,
                  observer: Optional[SearchObserver] = None,
                  seed: Optional[int] = None,
                  depth: int = 0) -> Union[Certificate, JuniorCaterpillar]:
    """(alpha,h,d)-junior caterpillar in cg, or an anti_pair certificate in cg.graph.

    `levels[d']` gives (colour count, alpha) for recursion level d'; it
    defaults to the exact schedule. `observer(cg, state, d, alpha)` runs
    after every step.
    """
    alpha = Fraction(alpha)
    if h < 1 or d < 0:
        raise ParameterError(f"need h >= 1 and d >= 0, got h={h}, d={d}")
    if levels is None:
        levels = schedule_levels(h, d)
    if any(not cls for cls in cg.classes):
        raise ParameterError("every colour class must be non-empty")
    g = cg.graph
    rng = random.Random(seed) if seed is not None else None

    state = SearchState(
        k=0,
        active=list(range(cg.ell)),
        working={i: cg.classes[i] for i in range(cg.ell)},
        families={i: [] for i in range(cg.ell)},
        depth=depth,
    )
    _notify(observer, cg, state, d, alpha)

    while not _should_stop(state, d):
        a = _pick_colour(state, d)
        w_a = state.working[a]
        if not w_a:
            raise InfeasibleError(f"working set of colour {a} is empty at step {state.k}", state.snapshot())

        a0 = largest_component(g, w_a)
        if 2 * len(a0) <= len(w_a):
            left, right = split_components(g, w_a)
            logger.debug(f"junior_search: W_{a} falls apart into halves {len(left)}/{len(right)}")
            return pair_certificate(g, left, right)

        reach0 = g.neighbourhood(a0)
        for i in state.active:
            if i != a and 2 * len(reach0 & state.working[i]) < len(state.working[i]):
                logger.debug(f"junior_search: A_0 misses half of W_{i}")
                return pair_certificate(g, a0, state.working[i] - reach0)

        root, b = _grow_root(cg, state, a, a0, rng)
        reach = g.neighbourhood(root)
        witness = is_alpha_bud(cg, root, alpha)
        if witness is None:
            raise InfeasibleError(f"root set of step {state.k} is not an alpha-bud", state.snapshot())

        wrapped = state.families[a]
        fern = Fern.wrap(Bud.of(root, witness), wrapped, arity=d + 1)
        state.active.remove(a)
        del state.working[a]
        del state.families[a]
        for i in state.active:
            state.working[i] = state.working[i] & reach if i == b else state.working[i] - reach
        state.families[b].append(fern)
        state.k += 1
        state.last_root = root

        for i in state.active:
            if len(state.working[i]) * 3 ** state.k >= len(cg.classes[i]):
                continue
            if i == b or not state.working[i]:
                raise InfeasibleError(f"working set of colour {i} shrank below 3^-{state.k}|V_{i}|", state.snapshot())
            # W_i avoids N(root), so the two are anti-adjacent
            logger.debug(f"junior_search: W_{i} shrank below 3^-{state.k}|V_{i}|")
            return pair_certificate(g, root, state.working[i])

        _notify(observer, cg, state, d, alpha)

    tall = [f for i in state.active for f in state.families[i] if f.height >= h]
    if tall:
        return fern_to_junior(cg, tall[0], h, d)
    if d == 0:
        raise InfeasibleError(f"no fern reached height {h} with {cg.ell} colours", state.snapshot())
    return _recurse(cg, state, h, d, alpha, levels, observer, seed, depth)


def _notify(observer: Optional[SearchObserver], cg: ColouredGraph, state: SearchState, d: int, alpha: Fraction) -> None:
    if trace_logger.isEnabledFor(logging.DEBUG):
        trace_logger.debug(json.dumps(state.snapshot(), sort_keys=True))
    if observer is not None:
        observer(cg, state, d, alpha)


def _should_stop(state: SearchState, d: int) -> bool:
    if len(state.active) <= 1:
        return True
    return all(0 < len(state.families[i]) < d + 1 for i in state.active)


def _pick_colour(state: SearchState, d: int) -> int:
    for i in state.active:
        if len(state.families[i]) == d + 1:
            return i
    for i in state.active:
        if not state.families[i]:
            return i
    raise InvariantViolation("no colour to expand although the search has not stopped")


def _grow_root(cg: ColouredGraph, state: SearchState, a: int, a0: VertexSet, rng: Optional[random.Random]):
    """Connected A inside a0, grown in BFS order, until it dominates a third of some W_b"""
    g = cg.graph
    start = rng.choice(sorted(a0)) if rng is not None else min(a0)
    others = [i for i in state.active if i != a]
    owner = {v: i for i in others for v in state.working[i]}
    hits = {i: 0 for i in others}
    reach: set = set()
    root: List[int] = []
    for v in bfs_order(g, start, a0):
        root.append(v)
        for w in g.neighbours(v) - reach:
            reach.add(w)
            if w in owner:
                hits[owner[w]] += 1
        for i in others:
            if 3 * hits[i] >= len(state.working[i]):
                return frozenset(root), i
    raise InvariantViolation(f"A_0 of colour {a} dominates no working set by a third")


def _recurse(cg: ColouredGraph, state: SearchState, h: int, d: int, alpha: Fraction,
             levels: List[Level], observer: Optional[SearchObserver], seed: Optional[int],
             depth: int) -> Union[Certificate, JuniorCaterpillar]:
    ell_below, alpha_below = levels[d - 1]
    if len(state.active) < ell_below:
        raise InfeasibleError(
            f"only {len(state.active)} colours survive, recursion needs {ell_below}", state.snapshot())
    chosen = sorted(state.active)[:ell_below]
    sub = ColouredGraph(cg.graph, [state.working[i] for i in chosen])
    logger.debug(f"junior_search: recursing with d={d - 1} on {ell_below} working sets")
    inner = junior_search(sub, h, d - 1, alpha_below, levels=levels[:d], observer=observer,
                          seed=seed, depth=depth + 1)
    if isinstance(inner, Certificate):
        return inner

    rows = []
    for i, v in enumerate(inner.path):
        colour = chosen[sub.colour_of(v)]
        private = inner.buds[i]
        root_bud = state.families[colour][0].root
        row = []
        for bud in private + [root_bud]:
            witness = is_alpha_bud(cg, bud.members, alpha)
            if witness is None:
                raise InfeasibleError(f"a private bud of path vertex {v} is not an alpha-bud", state.snapshot())
            row.append(Bud.of(bud.vertices, witness))
        rows.append(row)
    jc = JuniorCaterpillar(path=list(inner.path), buds=rows)
    verdict = validate_junior(cg, jc, alpha, h, d)
    if not verdict:
        raise InvariantViolation(f"assembled junior caterpillar is invalid: {verdict.reason}")
    return jc
