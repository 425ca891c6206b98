#!/usr/bin/env python3
"""
Tests for the constant schedule, sparsification and the dichotomy driver
"""

import os
import random
import sys
import unittest
from fractions import Fraction

from hypothesis import given, settings

# Add the parent directory to the path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.errors import DiagnosticFailure, DomainError, ParameterError, SparsifyFailure
from src.generators import generate
from src.graph_core import CaterpillarShape, Graph, complement, equipartition, make_caterpillar
from src.oracle import find_induced_naive, max_anti_pair_bruteforce, pair_certificate, verify_certificate
from src.pipeline import (
    DichotomyOptions,
    constants,
    dichotomy,
    eps_condition_holds,
    is_clean,
    resolve_constants,
    run_dichotomy,
    sparsify,
)
from tests.factories import (
    THIRD,
    clique,
    cycle_graph,
    disjoint_union,
    gnp,
    graphs,
    path_graph,
    sparse_coloured_instance,
    spider,
)


class TestConstants(unittest.TestCase):
    """Test the exact constant schedule"""

    def test_smallest_shape(self):
        """Test T(1,0,0): ell = 3, alpha = 1/270, eps = alpha/60"""
        schedule = constants(CaterpillarShape(h=1, d=0, t=0))
        self.assertEqual(schedule.ell, 3)
        self.assertEqual(schedule.alpha.value, Fraction(1, 270))
        self.assertEqual(schedule.eps.value, Fraction(1, 16200))
        report = schedule.as_report()
        self.assertEqual(report["alpha"], "1/270")
        self.assertEqual(report["eps"], "1/16200")
        self.assertEqual(report["min_n"]["eps_n_at_least_1"], "16200")
        self.assertEqual(report["min_n"]["alpha_class_share_at_least_1"], "810")
        self.assertEqual(report["min_n"]["first_bud_threshold_at_least_1"], "810")

    def test_first_bud_threshold_row(self):
        """Test the first bud threshold 20*hdt*eps*n reaches one vertex exactly at the reported n"""
        schedule = constants(CaterpillarShape(h=1, d=1, t=1))
        self.assertEqual(schedule.eps.value, Fraction(1, 3 ** 19 * 100 * 640))
        n = int(schedule.min_n()["first_bud_threshold_at_least_1"])
        self.assertEqual(n, 3719236694400)
        self.assertEqual(20 * schedule.eps.value * n, 1)
        # shape with hdt = 4 divides the eps denominator by 80
        wide = constants(CaterpillarShape(h=2, d=1, t=2))
        n = int(wide.min_n()["first_bud_threshold_at_least_1"])
        self.assertEqual(80 * wide.eps.value * n, 1)

    def test_recurrence(self):
        """Test ell(2,1) = 38 and the exponent of alpha(2,1)"""
        schedule = constants(CaterpillarShape(h=2, d=1, t=2))
        self.assertEqual(schedule.ell, 38)
        self.assertEqual(schedule.alpha.value, Fraction(1, 3 ** 42 * 100))
        self.assertEqual([lv["ell"] for lv in schedule.as_report()["levels"]], [4, 38])

    def test_monotone(self):
        """Test ell grows and alpha shrinks with h and d"""
        ells = [constants(CaterpillarShape(h=h, d=d, t=1)).ell for h, d in ((1, 1), (2, 1), (2, 2))]
        self.assertEqual(ells, sorted(set(ells)))
        alphas = [constants(CaterpillarShape(h=1, d=d, t=1)).alpha.value for d in (1, 2)]
        self.assertGreater(alphas[0], alphas[1])

    def test_symbolic_rendering(self):
        """Test huge exponents render without expansion"""
        schedule = constants(CaterpillarShape(h=3, d=3, t=1))
        self.assertFalse(schedule.materialisable)
        self.assertTrue(schedule.as_report()["alpha"].startswith("3^-"))

    def test_eps_condition(self):
        """Test the default eps satisfies the leg-attachment condition"""
        shape = CaterpillarShape(h=2, d=1, t=2)
        schedule = constants(shape)
        self.assertTrue(eps_condition_holds(shape, schedule.ell, schedule.eps.value, schedule.alpha.value))
        self.assertFalse(eps_condition_holds(shape, schedule.ell, Fraction(1, 10), schedule.alpha.value))


class TestResolveConstants(unittest.TestCase):
    """Test overrides and guarantee mode"""

    def setUp(self):
        self.shape = CaterpillarShape(h=1, d=1, t=1)
        self.schedule = constants(self.shape)

    def test_exact_schedule(self):
        """Test no overrides reproduces the schedule"""
        resolved = resolve_constants(self.shape, self.schedule, DichotomyOptions())
        self.assertFalse(resolved.experimental)
        self.assertEqual(resolved.ell, 16)
        self.assertEqual(resolved.alpha, self.schedule.alpha.value)
        self.assertEqual(len(resolved.levels), 2)

    def test_overrides_are_experimental(self):
        """Test overrides scale the levels and log a warning"""
        options = DichotomyOptions(ell=5, alpha=Fraction(1, 10))
        with self.assertLogs("src.pipeline", level="WARNING"):
            resolved = resolve_constants(self.shape, self.schedule, options)
        self.assertTrue(resolved.experimental)
        self.assertEqual(resolved.eps, Fraction(1, 10) / (20 * 1 * 2 * 5))
        self.assertEqual(resolved.levels[-1].ell, 5)

    def test_out_of_range(self):
        """Test invalid overrides"""
        for options in (DichotomyOptions(ell=0), DichotomyOptions(alpha=Fraction(3, 2)),
                        DichotomyOptions(eps=Fraction(1, 2))):
            with self.assertRaises(ParameterError):
                resolve_constants(self.shape, self.schedule, options)

    def test_guarantee_mode(self):
        """Test guarantee mode rejects an eps that breaks the condition"""
        with self.assertRaises(ParameterError):
            resolve_constants(self.shape, self.schedule,
                              DichotomyOptions(ell=3, alpha=Fraction(1, 10), eps=Fraction(1, 100), guarantee=True))
        resolved = resolve_constants(self.shape, self.schedule,
                                     DichotomyOptions(ell=3, alpha=Fraction(1, 10), guarantee=True))
        self.assertEqual(resolved.eps, Fraction(1, 1200))

    def test_unmaterialisable_needs_overrides(self):
        """Test the exact schedule is refused when alpha cannot be expanded"""
        shape = CaterpillarShape(h=3, d=3, t=1)
        with self.assertRaises(ParameterError):
            resolve_constants(shape, constants(shape), DichotomyOptions())


class TestSparsify(unittest.TestCase):
    """Test the sparsification contract"""

    def test_edgeless_is_clean(self):
        """Test an edgeless graph is clean in the original polarity"""
        result = sparsify(Graph(8), Fraction(1, 4), path_graph(3))
        self.assertEqual(result.clean_side, list(range(8)))
        self.assertEqual(result.polarity, "original")

    def test_clique_is_clean_complemented(self):
        """Test K_n is clean in the complemented polarity"""
        result = sparsify(clique(6), Fraction(1, 4), path_graph(3))
        self.assertEqual(result.clean_side, list(range(6)))
        self.assertEqual(result.polarity, "complemented")
        self.assertTrue(is_clean(clique(6), result.clean_side, "complemented", Fraction(1, 4)))
        self.assertFalse(is_clean(clique(6), result.clean_side, "original", Fraction(1, 4)))

    def test_witness(self):
        """Test a pattern found during the search is returned as a witness"""
        host = cycle_graph(5)
        result = sparsify(host, Fraction(1, 4), path_graph(3))
        self.assertTrue(result.is_witness)
        chosen = [result.witness[p] for p in range(3)]
        sub, _ = host.induced_subgraph(chosen)
        self.assertIsNotNone(find_induced_naive(sub, path_graph(3)))

    def test_concurrent_search(self):
        """Test both polarities searched concurrently agree with the sequential run"""
        host = gnp(25, 0.5, 4)
        pattern = make_caterpillar(CaterpillarShape(h=2, d=1, t=1)).graph
        sequential = sparsify(host, Fraction(1, 4), pattern)
        concurrent = sparsify(host, Fraction(1, 4), pattern, concurrent=True, threads=2)
        self.assertEqual(sequential, concurrent)

    def test_failure_carries_diagnostics(self):
        """Test no clean side and no witness raises SparsifyFailure"""
        pattern = make_caterpillar(CaterpillarShape(h=3, d=2, t=2)).graph
        with self.assertRaises(SparsifyFailure) as ctx:
            sparsify(cycle_graph(5), Fraction(1, 10), pattern, min_size=5)
        self.assertEqual(ctx.exception.diagnostics["best_size"], 5)
        self.assertEqual(ctx.exception.diagnostics["best_subset"], [0, 1, 2, 3, 4])

    def test_eps_range(self):
        """Test eps' outside (0, 1/2)"""
        with self.assertRaises(ParameterError):
            sparsify(Graph(3), Fraction(1, 2), path_graph(2))


class TestDichotomy(unittest.TestCase):
    """Test the end-to-end driver"""

    def test_two_cliques(self):
        """Test two disjoint K_20 give the two cliques as an anti_pair"""
        g = disjoint_union(clique(20), clique(20))
        run = run_dichotomy(g, path_graph(4))
        self.assertEqual(run.certificate.kind, "anti_pair")
        self.assertEqual(sorted(map(len, (run.certificate.set_a, run.certificate.set_b))), [20, 20])
        self.assertEqual(run.report.stage_reached, "split_probe")
        self.assertTrue(run.report.verified)
        self.assertFalse(run.report.experimental)

    def test_complement_of_two_cliques(self):
        """Test the complement gives a full_pair"""
        g = complement(disjoint_union(clique(20), clique(20)))
        cert = dichotomy(g, path_graph(4))
        self.assertEqual(cert.kind, "full_pair")
        self.assertTrue(verify_certificate(g, cert))

    def test_planted_pattern(self):
        """Test a planted T(2,1,2) is reported as an induced pattern"""
        shape = CaterpillarShape(h=2, d=1, t=2)
        g = generate("planted_caterpillar", 30, seed=3, shape=shape).graph
        run = run_dichotomy(g, shape)
        self.assertEqual(run.certificate.kind, "induced_pattern")
        self.assertEqual(run.report.stage_reached, "sparsify")
        self.assertEqual(run.certificate.shape, shape)

    def test_junior_stage(self):
        """Test a long cycle reaches the junior search on its clean side"""
        seen = []
        options = DichotomyOptions(ell=3, alpha=THIRD)
        run = run_dichotomy(cycle_graph(60), CaterpillarShape(h=1, d=3, t=3), options,
                            search_observer=lambda cg, state, d, alpha: seen.append(state.k))
        self.assertEqual(run.report.stage_reached, "junior_search")
        self.assertEqual(run.certificate.kind, "anti_pair")
        self.assertTrue(run.report.experimental)
        self.assertGreaterEqual(run.report.clean_size, 3)
        self.assertTrue(seen)

    def test_leg_stage_in_both_polarities(self):
        """Test a clean instance and its complement finish through leg attachment"""
        shape = CaterpillarShape(h=1, d=0, t=0)
        for seed in range(4):
            sparse = sparse_coloured_instance(seed)
            middle = equipartition(sparse, 3, seed).classes[1]
            # budget 0 gives up on the direct pattern search at once
            options = DichotomyOptions(eps=Fraction(49, 100), budget=0, seed=seed)
            for g, polarity, kind in ((sparse, "original", "induced_pattern"),
                                      (complement(sparse), "complemented", "induced_pattern_complement")):
                steps = []
                run = run_dichotomy(g, shape, options,
                                    search_observer=lambda cg, state, d, alpha: steps.append(state.k))
                self.assertEqual(run.report.stage_reached, "attach_legs")
                self.assertEqual(run.report.polarity, polarity)
                self.assertEqual(run.report.clean_size, 90)
                self.assertTrue(run.report.experimental)
                self.assertEqual(run.certificate.kind, kind)
                self.assertEqual(list(run.certificate.embedding), [0])
                self.assertIn(run.certificate.embedding[0], middle)
                self.assertEqual(steps, [0, 1, 2])
                self.assertTrue(verify_certificate(g, run.certificate))

    def test_non_caterpillar_pattern(self):
        """Test patterns that are not caterpillars are rejected"""
        with self.assertRaises(DomainError):
            dichotomy(path_graph(5), cycle_graph(4))
        with self.assertRaises(DomainError):
            dichotomy(Graph(0), path_graph(3))

    def test_deterministic(self):
        """Test repeated runs give identical certificates and reports"""
        g = gnp(30, 0.5, 9)
        options = DichotomyOptions(ell=3, alpha=THIRD, seed=5)
        first = run_dichotomy(g, spider(3, 1), options)
        second = run_dichotomy(g, spider(3, 1), options)
        self.assertEqual(first.certificate.model_dump_json(), second.certificate.model_dump_json())
        self.assertEqual(first.report.model_dump_json(), second.report.model_dump_json())

    def test_soundness_across_generators(self):
        """Test every certificate from seeded generator instances verifies"""
        rng = random.Random(99)
        names = ["gnp", "two_cliques", "planted_caterpillar", "planted_bipartite_hole", "bounded_degree"]
        shapes = [CaterpillarShape(h=1, d=2, t=2), CaterpillarShape(h=2, d=1, t=1), CaterpillarShape(h=1, d=3, t=1)]
        emitted = 0
        for run in range(60):
            name = names[run % len(names)]
            shape = shapes[run % len(shapes)]
            n = rng.randint(12, 40)
            g = generate(name, n, seed=run, p=Fraction(rng.randint(1, 9), 10), shape=shape).graph
            options = DichotomyOptions(ell=3, alpha=THIRD, seed=run, budget=20_000, exhaustive_limit=10)
            try:
                cert = dichotomy(g, shape, options)
            except DiagnosticFailure:
                continue
            emitted += 1
            self.assertTrue(verify_certificate(g, cert))
        self.assertGreater(emitted, 0)

    def test_pairs_never_beat_bruteforce(self):
        """Test emitted pairs are no larger than the exhaustive optimum"""
        rng = random.Random(8)
        shape = CaterpillarShape(h=2, d=1, t=1)
        for run in range(200):
            n = rng.randint(2, 10)
            g = gnp(n, rng.random(), run)
            try:
                cert = dichotomy(g, shape, DichotomyOptions(ell=2, alpha=THIRD, seed=run))
            except DiagnosticFailure:
                continue
            if not cert.is_pair:
                continue
            host = g if cert.kind == "anti_pair" else complement(g)
            a, b = max_anti_pair_bruteforce(host)
            self.assertTrue(verify_certificate(host, pair_certificate(host, a, b)))
            self.assertLessEqual(min(len(cert.set_a), len(cert.set_b)), min(len(a), len(b)))

    @given(graphs(max_n=8))
    @settings(max_examples=60, deadline=None)
    def test_polarity_translation(self, g):
        """Test an anti_pair of the complement is a full_pair of the graph"""
        best = max_anti_pair_bruteforce(complement(g))
        if best is None:
            return
        a, b = best
        self.assertTrue(verify_certificate(complement(g), pair_certificate(g, a, b, "anti_pair")))
        self.assertTrue(verify_certificate(g, pair_certificate(g, a, b, "full_pair")))


if __name__ == "__main__":
    unittest.main()
