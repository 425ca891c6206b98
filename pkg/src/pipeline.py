"""
End-to-end dichotomy driver.

Stages, in order:
  split_probe    disconnected input or complement gives a pair at once
  sparsify       clean side (small degree in one polarity) or a pattern witness
  junior_search  equipartition the clean side and search a junior caterpillar
  attach_legs    grow the legs of T(h,d,t)
Every certificate is translated back to the input's vertex ids and polarity
and verified against the input before it is returned.
"""

import asyncio
import logging
import math
from fractions import Fraction
from itertools import combinations
from typing import Any, Dict, List, Literal, NamedTuple, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict

from .algorithms import Observer, attach_legs
from .errors import DomainError, InvariantViolation, ParameterError, SparsifyFailure
from .graph_core import (
    CaterpillarShape,
    Embedding,
    Graph,
    balanced_split,
    complement_components,
    connected_components,
    equipartition,
    is_caterpillar,
    make_caterpillar,
)
from .junior_search import (
    MATERIALISE_LIMIT,
    Level,
    LevelConstants,
    SearchObserver,
    junior_search,
    level_table,
    scaled_levels,
)
from .oracle import (
    Certificate,
    find_induced_bounded,
    is_induced_embedding,
    pair_certificate,
    pattern_certificate,
    verify_certificate,
)
from .rationals import FractionField, Rational, ceil_fraction, format_fraction

logger = logging.getLogger(__name__)

Polarity = Literal["original", "complemented"]
DIGIT_LIMIT = 60
EXHAUSTIVE_LIMIT = 18


class TinyRational(BaseModel):
    """1 / (3^three_exponent * 10^ten_exponent * divisor), kept unexpanded"""
    three_exponent: int
    ten_exponent: int
    divisor: int = 1

    @property
    def digits(self) -> int:
        return int(self.three_exponent * math.log10(3) + self.ten_exponent + math.log10(self.divisor)) + 1

    @property
    def value(self) -> Fraction:
        if self.three_exponent > MATERIALISE_LIMIT:
            raise ParameterError(f"3^-{self.three_exponent} is too small to expand")
        return Fraction(1, 3 ** self.three_exponent * 10 ** self.ten_exponent * self.divisor)

    def render(self) -> str:
        if self.digits <= DIGIT_LIMIT:
            return format_fraction(self.value)
        tail = f"/{self.divisor}" if self.divisor != 1 else ""
        return f"3^-{self.three_exponent}/10^{self.ten_exponent}{tail}"

    def render_inverse(self, factor: int = 1) -> str:
        """factor / self as an integer string"""
        if self.digits + len(str(factor)) <= DIGIT_LIMIT:
            return str(factor * 3 ** self.three_exponent * 10 ** self.ten_exponent * self.divisor)
        return f"3^{self.three_exponent}*10^{self.ten_exponent}*{factor * self.divisor}"


class ConstantSchedule(BaseModel):
    """Exact constants for one shape"""
    shape: CaterpillarShape
    levels: List[LevelConstants]
    ell: int
    alpha: TinyRational
    eps: TinyRational

    @property
    def materialisable(self) -> bool:
        return self.alpha.three_exponent <= MATERIALISE_LIMIT

    def min_n(self) -> Dict[str, str]:
        """Smallest n at which each threshold stops being vacuous"""
        return {
            "ell_classes": str(self.ell),
            "eps_n_at_least_1": self.eps.render_inverse(),
            "alpha_class_share_at_least_1": self.alpha.render_inverse(self.ell),
            "degree_bound_at_least_1": self.eps.render_inverse(self.ell),
            "first_bud_threshold_at_least_1": self._first_bud().render_inverse(),
        }

    def _first_bud(self) -> TinyRational:
        """20 * max(1,hdt) * eps, the first bud threshold over n"""
        hdt = max(1, self.shape.h * self.shape.d * self.shape.t)
        return self.eps.model_copy(update={"divisor": self.eps.divisor // (20 * hdt)})

    def as_report(self) -> Dict[str, Any]:
        return {
            "shape": self.shape.model_dump(),
            "levels": [
                {"d": lv.d, "ell": lv.ell,
                 "alpha": TinyRational(three_exponent=lv.three_exponent, ten_exponent=lv.ten_exponent).render()}
                for lv in self.levels
            ],
            "ell": self.ell,
            "alpha": self.alpha.render(),
            "eps": self.eps.render(),
            "min_n": self.min_n(),
        }


def _eps_divisor(shape: CaterpillarShape, ell: int) -> int:
    hd = shape.h * shape.d
    return 20 * max(1, hd * shape.t) * 2 ** hd * ell


def constants(shape: CaterpillarShape) -> ConstantSchedule:
    """Colour count, bud constant alpha and degree constant eps for a shape.

    eps = alpha / (20 * max(1,hdt) * 2^(hd) * ell), which keeps
    10 hdt 2^(hd) ell eps < alpha.
    """
    levels = level_table(shape.h, shape.d)
    top = levels[-1]
    alpha = TinyRational(three_exponent=top.three_exponent, ten_exponent=top.ten_exponent)
    eps = TinyRational(three_exponent=top.three_exponent, ten_exponent=top.ten_exponent,
                       divisor=_eps_divisor(shape, top.ell))
    return ConstantSchedule(shape=shape, levels=levels, ell=top.ell, alpha=alpha, eps=eps)


def eps_condition_holds(shape: CaterpillarShape, ell: int, eps: Rational, alpha: Rational) -> bool:
    """10 * hdt * 2^(hd) * ell * eps < alpha"""
    hd = shape.h * shape.d
    return 10 * max(1, hd * shape.t) * 2 ** hd * ell * Fraction(eps) < Fraction(alpha)


class DichotomyOptions(BaseModel):
    """Overrides and knobs for one pipeline run; any of ell/eps/alpha marks it experimental"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    ell: Optional[int] = None
    eps: Optional[FractionField] = None
    alpha: Optional[FractionField] = None
    budget: int = 200_000
    seed: int = 0
    concurrent: bool = False
    threads: int = 1
    guarantee: bool = False
    min_clean_size: Optional[int] = None
    exhaustive_limit: int = EXHAUSTIVE_LIMIT

    @property
    def experimental(self) -> bool:
        return self.ell is not None or self.eps is not None or self.alpha is not None


class ResolvedConstants(NamedTuple):
    ell: int
    alpha: Fraction
    eps: Fraction
    levels: List[Level]
    experimental: bool


def resolve_constants(shape: CaterpillarShape, schedule: ConstantSchedule, options: DichotomyOptions) -> ResolvedConstants:
    if not options.experimental and not schedule.materialisable:
        raise ParameterError(
            f"the exact schedule for {shape} has alpha = {schedule.alpha.render()}; "
            "pass --ell/--alpha/--eps to run an experimental schedule")
    ell = options.ell if options.ell is not None else schedule.ell
    if ell < 1:
        raise ParameterError(f"ell must be >= 1, got {ell}")
    alpha = options.alpha if options.alpha is not None else schedule.alpha.value
    if not 0 < alpha <= 1:
        raise ParameterError(f"alpha must lie in (0, 1], got {format_fraction(alpha)}")
    eps = options.eps if options.eps is not None else alpha / _eps_divisor(shape, ell)
    if not 0 < eps < Fraction(1, 2):
        raise ParameterError(f"eps must lie in (0, 1/2), got {format_fraction(eps)}")
    if options.guarantee and not eps_condition_holds(shape, ell, eps, alpha):
        raise ParameterError(
            f"guarantee mode: 10*hdt*2^(hd)*ell*eps < alpha fails for ell={ell}, "
            f"eps={format_fraction(eps)}, alpha={format_fraction(alpha)}")
    if options.ell is not None or options.alpha is not None:
        levels = scaled_levels(shape.h, shape.d, ell, alpha)
    else:
        levels = [Level(lv.ell, lv.alpha) for lv in schedule.levels]
    if options.experimental:
        logger.warning(f"Experimental schedule for {shape}: ell={ell}, alpha={format_fraction(alpha)}, "
                       f"eps={format_fraction(eps)}; asymptotic guarantees do not apply")
    return ResolvedConstants(ell, Fraction(alpha), Fraction(eps), levels, options.experimental)


class SparsifyResult(BaseModel):
    """Either a verified clean side or a pattern witness, with its polarity"""
    clean_side: Optional[List[int]] = None
    witness: Optional[Dict[int, int]] = None
    polarity: Polarity = "original"

    @property
    def is_witness(self) -> bool:
        return self.witness is not None


def _polarity_graph(g0: Graph, polarity: Polarity, pattern: Graph) -> Tuple[Graph, Graph]:
    # search complement(pattern) in g0 instead of pattern in complement(g0)
    return (g0, pattern) if polarity == "original" else (g0, pattern.complement())


async def _probe_concurrently(g0: Graph, pattern: Graph, budget: int, threads: int):
    gate = asyncio.Semaphore(max(1, threads))

    async def probe(polarity: Polarity):
        async with gate:
            host, target = _polarity_graph(g0, polarity, pattern)
            return await asyncio.to_thread(find_induced_bounded, host, target, budget)

    return await asyncio.gather(probe("original"), probe("complemented"))


def _witness_search(g0: Graph, pattern: Graph, budget: int, concurrent: bool, threads: int):
    if concurrent:
        return asyncio.run(_probe_concurrently(g0, pattern, budget, threads))
    outcomes = []
    for polarity in ("original", "complemented"):
        host, target = _polarity_graph(g0, polarity, pattern)
        outcomes.append(find_induced_bounded(host, target, budget))
        if outcomes[-1].embedding is not None:
            break
    return outcomes


def is_clean(g0: Graph, subset: List[int], polarity: Polarity, eps_prime: Rational) -> bool:
    """Max degree of the chosen polarity on subset is at most eps' * |subset|"""
    members = frozenset(subset)
    size = len(members)
    bound = Fraction(eps_prime) * size
    for v in members:
        deg = len(g0.neighbours(v) & members)
        if polarity == "complemented":
            deg = size - 1 - deg
        if deg > bound:
            return False
    return True


def sparsify(g0: Graph, eps_prime: Rational, pattern: Graph, budget: int = 200_000,
             min_size: int = 1, exhaustive_limit: int = EXHAUSTIVE_LIMIT,
             concurrent: bool = False, threads: int = 1) -> SparsifyResult:
    """Clean side of size >= min_size under some polarity, or an induced pattern witness.

    Tries a bounded pattern search in both polarities, then greedy peeling,
    then exhaustive search for small inputs. Raises SparsifyFailure with the
    best subset found when all three come up empty.
    """
    eps_prime = Fraction(eps_prime)
    if not 0 < eps_prime < Fraction(1, 2):
        raise ParameterError(f"eps' must lie in (0, 1/2), got {format_fraction(eps_prime)}")

    outcomes = _witness_search(g0, pattern, budget, concurrent, threads)
    for polarity, outcome in zip(("original", "complemented"), outcomes):
        if outcome.embedding is None:
            continue
        host, target = _polarity_graph(g0, polarity, pattern)
        if not is_induced_embedding(host, target, outcome.embedding):
            raise InvariantViolation("pattern search returned a non-induced embedding")
        logger.info(f"sparsify: pattern witness found ({polarity}) after {outcome.nodes} search nodes")
        return SparsifyResult(witness=outcome.embedding, polarity=polarity)
    if any(o.exhausted for o in outcomes):
        logger.warning(f"sparsify: pattern search budget of {budget} nodes exhausted")

    found, best = _peel(g0, eps_prime, min_size)
    if found is None and g0.n <= exhaustive_limit:
        found = _exhaustive(g0, eps_prime, min_size)
    if found is not None:
        subset, polarity = found
        if not is_clean(g0, subset, polarity, eps_prime):
            raise InvariantViolation("sparsify produced a subset that fails the degree recheck")
        logger.info(f"sparsify: clean side of {len(subset)} vertices ({polarity})")
        return SparsifyResult(clean_side=sorted(subset), polarity=polarity)

    raise SparsifyFailure(
        f"no clean side of size >= {min_size} and no pattern witness",
        {
            "best_size": best[0],
            "best_excess": format_fraction(best[1]) if best[1] is not None else None,
            "best_polarity": best[2],
            "best_subset": best[3],
            "search_nodes": [o.nodes for o in outcomes],
            "budget_exhausted": any(o.exhausted for o in outcomes),
        },
    )


def _peel(g0: Graph, eps_prime: Fraction, min_size: int):
    """Remove the vertex with the largest min(degree, co-degree) until a polarity is clean"""
    alive = set(g0.vertices())
    deg = {v: g0.degree(v) for v in alive}
    best: Tuple[int, Optional[Fraction], Optional[str], List[int]] = (0, None, None, [])
    while len(alive) >= max(min_size, 1):
        size = len(alive)
        bound = eps_prime * size
        top = max(deg.values())
        co_top = size - 1 - min(deg.values())
        if top <= bound:
            return (sorted(alive), "original"), best
        if co_top <= bound:
            return (sorted(alive), "complemented"), best
        excess, polarity = min((top - bound, "original"), (co_top - bound, "complemented"))
        if best[1] is None or excess < best[1]:
            best = (size, excess, polarity, sorted(alive))
        victim = max(alive, key=lambda v: (min(deg[v], size - 1 - deg[v]), -v))
        alive.discard(victim)
        del deg[victim]
        for w in g0.neighbours(victim):
            if w in alive:
                deg[w] -= 1
    return None, best


def _exhaustive(g0: Graph, eps_prime: Fraction, min_size: int):
    adj = [sum(1 << w for w in g0.neighbours(v)) for v in g0.vertices()]
    for size in range(g0.n, max(min_size, 1) - 1, -1):
        bound = eps_prime * size
        for combo in combinations(range(g0.n), size):
            mask = sum(1 << v for v in combo)
            degs = [bin(adj[v] & mask).count("1") for v in combo]
            if max(degs) <= bound:
                return list(combo), "original"
            if size - 1 - min(degs) <= bound:
                return list(combo), "complemented"
    return None


class RunReport(BaseModel):
    schedule: Dict[str, Any]
    polarity: Optional[Polarity] = None
    stage_reached: str
    verified: bool
    experimental: bool
    kind: Optional[str] = None
    fraction_a: Optional[str] = None
    fraction_b: Optional[str] = None
    clean_size: Optional[int] = None


class DichotomyRun(NamedTuple):
    certificate: Certificate
    report: RunReport


def _resolve_shape(pattern: Union[Graph, CaterpillarShape]) -> CaterpillarShape:
    if isinstance(pattern, CaterpillarShape):
        return pattern
    match = is_caterpillar(pattern)
    if match is None:
        raise DomainError(f"pattern {pattern!r} is not a caterpillar")
    return match.shape


def _split_probe(g0: Graph, ell: int, eps: Fraction) -> Optional[Certificate]:
    need = max(1, ceil_fraction(eps / (2 * ell) * g0.n))
    for kind, comps in (("anti_pair", connected_components(g0)), ("full_pair", complement_components(g0))):
        split = balanced_split(comps)
        if split is not None and min(len(split[0]), len(split[1])) >= need:
            logger.info(f"split_probe: {len(comps)} components ({kind}), sides {len(split[0])}/{len(split[1])}")
            return pair_certificate(g0, split[0], split[1], kind)
    return None


def _translate(g0: Graph, cert_or_embedding: Union[Certificate, Embedding], host_of: List[int],
               polarity: Polarity, shape: CaterpillarShape) -> Certificate:
    flipped = polarity == "complemented"
    if isinstance(cert_or_embedding, Certificate):
        a = [host_of[v] for v in cert_or_embedding.set_a]
        b = [host_of[v] for v in cert_or_embedding.set_b]
        return pair_certificate(g0, a, b, "full_pair" if flipped else "anti_pair")
    embedding = {p: host_of[v] for p, v in cert_or_embedding.items()}
    return pattern_certificate(shape, embedding, complemented=flipped)


def run_dichotomy(g0: Graph, pattern: Union[Graph, CaterpillarShape],
                  options: Optional[DichotomyOptions] = None,
                  search_observer: Optional[SearchObserver] = None,
                  leg_observer: Optional[Observer] = None) -> DichotomyRun:
    """Certificate plus run report for g0 against a caterpillar (or a shape)"""
    options = options or DichotomyOptions()
    shape = _resolve_shape(pattern)
    schedule = constants(shape)
    resolved = resolve_constants(shape, schedule, options)
    ell, eps = resolved.ell, resolved.eps
    report = dict(schedule=schedule.as_report(), experimental=resolved.experimental)
    logger.info(f"Dichotomy for {shape} on {g0!r}: ell={ell}, eps={format_fraction(eps)}")

    def finish(cert: Certificate, stage: str, polarity: Optional[str] = None,
               clean_size: Optional[int] = None) -> DichotomyRun:
        verdict = verify_certificate(g0, cert)
        if not verdict:
            raise InvariantViolation(f"{cert.kind} certificate from stage {stage} failed verification: {verdict.reason}")
        logger.info(f"Verified {cert.kind} certificate from stage {stage}")
        run = RunReport(stage_reached=stage, polarity=polarity, verified=True, kind=cert.kind,
                        fraction_a=format_fraction(cert.fraction_a), fraction_b=format_fraction(cert.fraction_b),
                        clean_size=clean_size, **report)
        return DichotomyRun(cert, run)

    if g0.n == 0:
        raise DomainError("the input graph has no vertices")

    cert = _split_probe(g0, ell, eps)
    if cert is not None:
        return finish(cert, "split_probe")

    template = make_caterpillar(shape)
    min_size = options.min_clean_size if options.min_clean_size is not None else ell
    result = sparsify(g0, eps / ell, template.graph, budget=options.budget, min_size=max(min_size, ell),
                      exhaustive_limit=options.exhaustive_limit, concurrent=options.concurrent,
                      threads=options.threads)
    if result.is_witness:
        cert = pattern_certificate(shape, result.witness, complemented=result.polarity == "complemented")
        return finish(cert, "sparsify", result.polarity)

    host_of = list(result.clean_side)
    local, _ = g0.induced_subgraph(host_of)
    g = local.complement() if result.polarity == "complemented" else local
    cg = equipartition(g, ell, options.seed)
    logger.info(f"junior_search: {ell} classes of {len(cg.classes[0])} vertices ({result.polarity})")
    found = junior_search(cg, shape.h, shape.d, resolved.alpha, levels=resolved.levels,
                          observer=search_observer, seed=options.seed)
    if isinstance(found, Certificate):
        return finish(_translate(g0, found, host_of, result.polarity, shape), "junior_search",
                      result.polarity, len(host_of))

    logger.info(f"attach_legs: junior caterpillar on path {found.path}")
    legs = attach_legs(g, found, shape, eps, observer=leg_observer)
    return finish(_translate(g0, legs, host_of, result.polarity, shape), "attach_legs",
                  result.polarity, len(host_of))


def dichotomy(g0: Graph, pattern: Union[Graph, CaterpillarShape],
              options: Optional[DichotomyOptions] = None) -> Certificate:
    """Verified certificate for g0: a linear pair or an induced copy of T(h,d,t) or its complement"""
    return run_dichotomy(g0, pattern, options).certificate
