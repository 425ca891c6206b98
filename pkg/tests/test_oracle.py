#!/usr/bin/env python3
"""
Tests for the induced-subgraph oracles and the certificate verifier
"""

import os
import random
import sys
import unittest
from fractions import Fraction

import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher
from hypothesis import given, settings
from pydantic import ValidationError

# Add the parent directory to the path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.errors import MalformedCertificateError, SizeError
from src.graph_core import CaterpillarShape, Graph, complement, make_caterpillar
from src.graph_io import from_networkx, to_networkx
from src.oracle import (
    Certificate,
    find_induced,
    find_induced_bounded,
    find_induced_naive,
    is_induced_embedding,
    max_anti_pair_bruteforce,
    pair_certificate,
    pattern_certificate,
    verify_certificate,
)
from tests.factories import clique, cycle_graph, disjoint_union, graphs, path_graph, star


def caterpillar_patterns(max_order: int = 5):
    """Every tree on at most max_order vertices; all of them are caterpillars"""
    yield Graph(1)
    for order in range(2, max_order + 1):
        for nxg in nx.nonisomorphic_trees(order):
            yield from_networkx(nxg)


class TestInducedSearch(unittest.TestCase):
    """Test find_induced against independent oracles"""

    def test_examples(self):
        """Test P_3 in C_5, K_3 not in C_5, P_4 in C_6"""
        self.assertIsNotNone(find_induced(cycle_graph(5), path_graph(3)))
        self.assertIsNone(find_induced(cycle_graph(5), clique(3)))
        emb = find_induced(cycle_graph(6), path_graph(4))
        self.assertTrue(is_induced_embedding(cycle_graph(6), path_graph(4), emb))

    def test_agrees_with_naive_up_to_six(self):
        """Test presence/absence matches brute force on all hosts with up to 6 vertices"""
        patterns = list(caterpillar_patterns())
        for nxg in nx.graph_atlas_g():
            if nxg.number_of_nodes() > 6:
                break
            host = from_networkx(nxg)
            for pattern in patterns:
                ours = find_induced(host, pattern)
                naive = find_induced_naive(host, pattern)
                self.assertEqual(ours is None, naive is None, f"host {host.edges()} pattern {pattern.edges()}")
                if ours is not None:
                    self.assertTrue(is_induced_embedding(host, pattern, ours))

    def test_agrees_with_networkx_up_to_seven(self):
        """Test presence/absence matches networkx's induced matcher on all hosts with up to 7 vertices"""
        patterns = [(p, to_networkx(p)) for p in caterpillar_patterns()]
        for nxg in nx.graph_atlas_g():
            host = from_networkx(nxg)
            for pattern, nx_pattern in patterns:
                expected = GraphMatcher(nxg, nx_pattern).subgraph_is_isomorphic()
                self.assertEqual(find_induced(host, pattern) is not None, expected)

    def test_naive_size_cap(self):
        """Test the naive oracle refuses hosts above ten vertices"""
        with self.assertRaises(SizeError):
            find_induced_naive(path_graph(11), path_graph(2))

    def test_budget(self):
        """Test a tiny budget reports exhaustion instead of absence"""
        host = from_networkx(nx.gnp_random_graph(40, 0.5, seed=3))
        pattern = make_caterpillar(CaterpillarShape(h=3, d=2, t=2)).graph
        outcome = find_induced_bounded(host, pattern, budget=2)
        self.assertTrue(outcome.exhausted)
        self.assertIsNone(outcome.embedding)
        full = find_induced_bounded(path_graph(5), path_graph(3))
        self.assertFalse(full.exhausted)
        self.assertIsNotNone(full.embedding)

    def test_deterministic(self):
        """Test repeated searches return the same embedding"""
        host = from_networkx(nx.gnp_random_graph(30, 0.3, seed=11))
        pattern = path_graph(4)
        self.assertEqual(find_induced(host, pattern), find_induced(host, pattern))


class TestBruteforcePair(unittest.TestCase):
    """Test the exhaustive anti-pair search"""

    def test_two_cliques(self):
        """Test two disjoint triangles give sides of three"""
        a, b = max_anti_pair_bruteforce(disjoint_union(clique(3), clique(3)))
        self.assertEqual(min(len(a), len(b)), 3)

    def test_clique_has_no_pair(self):
        """Test K_n has no anti-adjacent pair"""
        self.assertIsNone(max_anti_pair_bruteforce(clique(5)))

    def test_result_is_anti_adjacent(self):
        """Test the optimum on random graphs is a valid pair"""
        rng = random.Random(5)
        for _ in range(20):
            g = from_networkx(nx.gnp_random_graph(rng.randint(2, 10), 0.4, seed=rng.randint(0, 10 ** 6)))
            best = max_anti_pair_bruteforce(g)
            if best is None:
                continue
            a, b = best
            self.assertTrue(verify_certificate(g, pair_certificate(g, a, b)))

    def test_size_cap(self):
        """Test the cap of twenty vertices"""
        with self.assertRaises(SizeError):
            max_anti_pair_bruteforce(path_graph(21))


class TestVerifier(unittest.TestCase):
    """Test verify_certificate"""

    def test_valid_pairs(self):
        """Test anti and full pairs"""
        g = disjoint_union(clique(2), clique(2))
        self.assertTrue(verify_certificate(g, pair_certificate(g, [0, 1], [2, 3], "anti_pair")))
        self.assertTrue(verify_certificate(complement(g), pair_certificate(g, [0, 1], [2, 3], "full_pair")))

    def test_edge_is_named(self):
        """Test the reason names the offending edge"""
        g = disjoint_union(clique(2), clique(2))
        cert = pair_certificate(g, [0, 1], [2, 3])
        broken = Graph(4, g.edges() + [(1, 2)])
        verdict = verify_certificate(broken, cert)
        self.assertFalse(verdict)
        self.assertIn("(1,2)", verdict.reason)

    def test_overlapping_and_empty_sides(self):
        """Test shared vertices and empty sides are rejected"""
        g = Graph(4)
        self.assertFalse(verify_certificate(g, pair_certificate(g, [0, 1], [1, 2])))
        self.assertFalse(verify_certificate(g, pair_certificate(g, [], [1])))

    def test_wrong_fractions(self):
        """Test fractions must match the side sizes"""
        g = Graph(4)
        cert = pair_certificate(g, [0], [1]).model_copy(update={"fraction_a": Fraction(1, 2)})
        self.assertFalse(verify_certificate(g, cert))

    def test_out_of_range_ids(self):
        """Test malformed certificates raise"""
        g = Graph(3)
        with self.assertRaises(MalformedCertificateError):
            verify_certificate(g, Certificate(kind="anti_pair", set_a=[0], set_b=[7]))
        with self.assertRaises(MalformedCertificateError):
            verify_certificate(g, Certificate(kind="induced_pattern"))

    def test_pattern_certificates(self):
        """Test direct and complemented pattern certificates"""
        shape = CaterpillarShape(h=1, d=1, t=2)
        host = path_graph(3)
        cert = pattern_certificate(shape, {0: 0, 1: 1, 2: 2})
        self.assertTrue(verify_certificate(host, cert))
        flipped = pattern_certificate(shape, {0: 0, 1: 1, 2: 2}, complemented=True)
        self.assertTrue(verify_certificate(complement(host), flipped))
        verdict = verify_certificate(host, flipped)
        self.assertFalse(verdict)
        self.assertIn("complement pattern", verdict.reason)

    def test_json_round_trip(self):
        """Test certificates survive JSON with 'p/q' fractions"""
        g = star(4)
        cert = pair_certificate(g, [1, 2], [3, 4])
        text = cert.model_dump_json()
        self.assertIn('"2/5"', text)
        again = Certificate.model_validate_json(text)
        self.assertEqual(again.fraction_a, Fraction(2, 5))
        self.assertTrue(verify_certificate(g, again))

    def test_unknown_kind(self):
        """Test an unknown kind tag fails schema validation"""
        with self.assertRaises(ValidationError):
            Certificate.model_validate_json('{"kind": "clique", "set_a": [0], "set_b": [1]}')

    @given(graphs(max_n=10))
    @settings(max_examples=60, deadline=None)
    def test_found_embeddings_verify(self, g):
        """Test every embedding find_induced returns passes the verifier"""
        shape = CaterpillarShape(h=1, d=1, t=2)
        emb = find_induced(g, make_caterpillar(shape).graph)
        if emb is not None:
            self.assertTrue(verify_certificate(g, pattern_certificate(shape, emb)))


if __name__ == "__main__":
    unittest.main()
