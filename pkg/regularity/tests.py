import json
import math
import tempfile
from fractions import Fraction
from io import StringIO
from itertools import combinations, permutations
from pathlib import Path

import networkx as nx
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, tag
from rest_framework import status
from rest_framework.test import APITestCase

from densities.invariants import named_pattern
from graphs.exceptions import (
    EnumerationCapError,
    IrregularPairError,
    LabError,
    PairCompletionError,
    RegularityCapError,
)
from graphs.formats import serialize_graph6, write_graph
from graphs.structures import Graph, complete, complete_bipartite, cycle, disjoint_union, path, star
from graphs.utils import mask_of, popcount
from tilings.certificates import tiling_problems

from .completion import (
    PairCompletionParams,
    PairRoute,
    classify_h_sets,
    complete_pair_tiling,
    enumerate_typed_copies,
    pair_host,
    repair_divisibility,
)
from .instances import (
    min_degree_host,
    pair_completion_instance,
    random_bipartite_pair,
    split_pair,
    super_regular_pair,
)
from .matching import hall_perfect_matching, is_hall_violator, neighbourhood
from .pairs import (
    CheckMode,
    RegularityVerdict,
    check_eps_regular,
    check_eps_regular_exact,
    check_eps_regular_sampled,
    check_super_regular,
    is_irregularity_witness,
    pair_density,
    reduced_graph,
    superregularize,
)
from .properties import PropertyMode, check_F_H, check_F_H_avoiding, check_F_H_prime
from .stars import greedy_star_tiling

K2, K3 = named_pattern("k2"), named_pattern("k3")


def without_edges_at(g: Graph, v: int) -> Graph:
    return Graph(g.n, frozenset(e for e in g.edges if v not in e))


def bipartite_from_bits(k: int, bits: int) -> Graph:
    """Bit i·k + j ⇒ arista (i, k + j)."""
    return Graph(2 * k, frozenset((i, k + j) for i in range(k) for j in range(k) if bits >> (i * k + j) & 1))


def oracle_super_regular(g: Graph, a, b, eps: Fraction, d: Fraction) -> bool:
    """Definición literal: grados y todos los pares (X, Y) de tamaño mínimo o mayor."""
    a, b = sorted(a), sorted(b)
    if any(not len(g.neighbors(v) & set(b)) > d * len(b) for v in a):
        return False
    if any(not len(g.neighbors(v) & set(a)) > d * len(a) for v in b):
        return False
    kx, ky = max(1, math.ceil(eps * len(a))), max(1, math.ceil(eps * len(b)))
    ys = [(mask_of(y), len(y)) for size in range(ky, len(b) + 1) for y in combinations(b, size)]
    for size in range(kx, len(a) + 1):
        for x in combinations(a, size):
            for y_mask, y_size in ys:
                e = sum(popcount(g.masks[u] & y_mask) for u in x)
                if not Fraction(e, size * y_size) > d:
                    return False
    return True


def oracle_eps_regular(g: Graph, a, b, eps: Fraction) -> bool:
    a, b = sorted(a), sorted(b)
    total = pair_density(g, a, b)
    kx, ky = max(1, math.ceil(eps * len(a))), max(1, math.ceil(eps * len(b)))
    for sx in range(kx, len(a) + 1):
        for x in combinations(a, sx):
            for sy in range(ky, len(b) + 1):
                for y in combinations(b, sy):
                    if abs(pair_density(g, x, y) - total) >= eps:
                        return False
    return True


class PairDensityTestCase(SimpleTestCase):
    """Tests para la densidad de pares"""

    def test_examples(self):
        """Test: bipartito completo 1, sin aristas 0, K4 partido en dos 1"""
        self.assertEqual(pair_density(complete_bipartite(3, 4), range(3), range(3, 7)), 1)
        self.assertEqual(pair_density(Graph(6), range(3), range(3, 6)), 0)
        self.assertEqual(pair_density(complete(4), {0, 1}, {2, 3}), 1)

    def test_split_pair_density(self):
        """Test: el par partido tiene densidad 1/2"""
        g, a, b, _, _ = split_pair(4)
        self.assertEqual(pair_density(g, a, b), Fraction(1, 2))

    def test_empty_side_rejected(self):
        """Test: un lado vacío es un error"""
        with self.assertRaises(LabError):
            pair_density(complete(4), [], {2, 3})


class EpsRegularTestCase(SimpleTestCase):
    """Tests para la comprobación de ε-regularidad"""

    def test_complete_and_empty_pairs_are_regular(self):
        """Test: bipartito completo y par vacío son ε-regulares para cualquier ε"""
        for eps in ("1/10", "1/4", "1/2"):
            report = check_eps_regular_exact(complete_bipartite(5, 5), range(5), range(5, 10), eps)
            self.assertEqual(report.verdict, RegularityVerdict.YES)
            report = check_eps_regular_exact(Graph(10), range(5), range(5, 10), eps)
            self.assertEqual(report.verdict, RegularityVerdict.YES)

    def test_split_pair_is_irregular(self):
        """Test: el par partido no es 1/4-regular y el testigo se verifica"""
        g, a, b, a1, b2 = split_pair(4)
        report = check_eps_regular_exact(g, a, b, "1/4")
        self.assertEqual(report.verdict, RegularityVerdict.NO)
        self.assertFalse(report.regular)
        x, y = report.witness
        self.assertTrue(is_irregularity_witness(g, a, b, x, y, "1/4"))
        self.assertTrue(is_irregularity_witness(g, a, b, a1, b2, "1/4"))
        self.assertEqual(pair_density(g, a1, b2), 0)

    def test_exact_matches_definition(self):
        """Test: el veredicto exacto coincide con la definición en pares 5×5"""
        eps = Fraction(1, 3)
        for seed in range(12):
            g, a, b = random_bipartite_pair(5, 5, 0.5, seed)
            report = check_eps_regular_exact(g, a, b, eps)
            self.assertEqual(report.regular, oracle_eps_regular(g, a, b, eps), f"seed={seed}")

    def test_exact_cap(self):
        """Test: lados de más de 16 vértices exigen el modo muestreado"""
        g, a, b = random_bipartite_pair(17, 17, 0.5, 0)
        with self.assertRaises(RegularityCapError):
            check_eps_regular_exact(g, a, b, "1/4")
        report = check_eps_regular(g, a, b, "1/4", mode=CheckMode.AUTO, trials=50)
        self.assertIn(report.verdict, (RegularityVerdict.NO, RegularityVerdict.SAMPLED_PLAUSIBLE))

    def test_sampled_finds_split_witness(self):
        """Test: el muestreo encuentra un testigo verificable en el par partido"""
        g, a, b, _, _ = split_pair(8)
        for seed in range(5):
            report = check_eps_regular_sampled(g, a, b, "1/4", trials=10000, seed=seed)
            self.assertEqual(report.verdict, RegularityVerdict.NO)
            self.assertTrue(is_irregularity_witness(g, a, b, *report.witness, "1/4"))

    def test_sampled_complete_pair_is_plausible(self):
        """Test: un par completo sólo puede ser 'sampled-plausible'"""
        report = check_eps_regular_sampled(complete_bipartite(6, 6), range(6), range(6, 12), "1/4", trials=200)
        self.assertEqual(report.verdict, RegularityVerdict.SAMPLED_PLAUSIBLE)
        self.assertTrue(report.regular)
        self.assertEqual(report.as_dict()["verdict"], "sampled-plausible")

    def test_bad_arguments(self):
        """Test: eps fuera de rango y lados solapados son errores"""
        g = complete_bipartite(3, 3)
        with self.assertRaises(LabError):
            check_eps_regular_exact(g, range(3), range(3, 6), 0)
        with self.assertRaises(LabError):
            check_eps_regular_exact(g, {0, 1, 3}, {3, 4}, "1/4")
        with self.assertRaises(LabError):
            check_eps_regular_sampled(g, range(3), range(3, 6), "1/4", trials=0)


class SuperRegularTestCase(SimpleTestCase):
    """Tests para la super-regularidad"""

    def test_complete_pair(self):
        """Test: bipartito completo es (0.1, 0.5)-super-regular"""
        report = check_super_regular(complete_bipartite(6, 6), range(6), range(6, 12), "0.1", "0.5")
        self.assertTrue(report)
        self.assertIsNone(report.failing_vertex)

    def test_isolated_vertex_fails(self):
        """Test: un vértice aislado en A se informa como vértice fallido"""
        g = without_edges_at(complete_bipartite(6, 6), 2)
        report = check_super_regular(g, range(6), range(6, 12), "0.1", "0.1")
        self.assertFalse(report)
        self.assertEqual(report.failing_vertex, 2)

    def test_exact_matches_definition(self):
        """Test: el modo exacto coincide con la definición en pares 8×8"""
        eps, d = Fraction(1, 4), Fraction(1, 5)
        for seed in range(8):
            g, a, b = random_bipartite_pair(8, 8, 0.8, seed)
            report = check_super_regular(g, a, b, eps, d, mode=CheckMode.EXACT)
            expected = oracle_super_regular(g, a, b, eps, d)
            self.assertEqual(report.holds, expected, f"seed={seed}")
            if report.witness is not None:
                x, y = report.witness
                self.assertLessEqual(pair_density(g, x, y), d)

    def test_super_regular_construction(self):
        """Test: el par construido pierde ≤ 1 arista por vértice y pasa el modo exacto"""
        for seed in range(5):
            g, a, b = super_regular_pair(12, 12, 0.7, "1/4", "2/5", seed)
            for v in a | b:
                self.assertGreaterEqual(g.degree(v), 11)
            self.assertTrue(check_super_regular(g, a, b, "1/4", "2/5", mode=CheckMode.EXACT).holds)
        g, a, b = super_regular_pair(14, 14, 0.5, "1/20", "2/5", 0)
        self.assertEqual(g.edge_count, 14 * 14)
        instance = pair_completion_instance(12, 12, 0.7, 0.3, 1, eps="1/4", d="2/5")
        self.assertEqual(instance.super_regular.mode, CheckMode.EXACT)
        with self.assertRaises(LabError):
            pair_completion_instance(12, 12, 0.7, 0.3, 1, eps="1/4")

    def test_sampled_witness_is_sound(self):
        """Test: un testigo muestreado tiene densidad ≤ d"""
        g, a, b, _, _ = split_pair(8)
        g = Graph(g.n, g.edges | {(0, 31), (15, 16)})
        report = check_super_regular(g, a, b, "1/4", "1/10", mode=CheckMode.SAMPLED, trials=5000, seed=3)
        if not report.holds and report.witness is not None:
            self.assertLessEqual(pair_density(g, *report.witness), Fraction(1, 10))


class SuperregularizeTestCase(SimpleTestCase):
    """Tests para el recorte a un par super-regular"""

    def test_complete_pair_unchanged(self):
        """Test: un par completo no pierde vértices"""
        result = superregularize(complete_bipartite(5, 5), range(5), range(5, 10), "1/4", "1/2")
        self.assertEqual(result.side_a, frozenset(range(5)))
        self.assertEqual(result.side_b, frozenset(range(5, 10)))
        self.assertFalse(result.removed_a or result.removed_b)

    def test_isolated_vertices_removed(self):
        """Test: los vértices aislados añadidos a A se recortan"""
        g = complete_bipartite(10, 10)
        g = without_edges_at(without_edges_at(g, 0), 1)
        result = superregularize(g, range(10), range(10, 20), "1/5", "1/2")
        self.assertEqual(result.removed_a, frozenset({0, 1}))
        self.assertEqual(result.side_a, frozenset(range(2, 10)))
        self.assertTrue(result.report.holds)

    def test_broken_promise(self):
        """Test: recortar más de ε de un lado lanza IrregularPairError con informe"""
        g, a, b, _, _ = split_pair(6)
        g = Graph(g.n, frozenset(e for e in g.edges if e[0] >= 3))
        with self.assertRaises(IrregularPairError) as ctx:
            superregularize(g, a, b, "1/10", "1/2")
        self.assertIsNotNone(ctx.exception.report)

    def test_random_pairs(self):
        """Test: pares aleatorios 14×14 (p=0.6, ε=0.2, d=0.5) pasan la verificación (2ε, d−3ε)"""
        eps, d = Fraction(1, 5), Fraction(1, 2)
        passed = 0
        for seed in range(100):
            g, a, b = random_bipartite_pair(14, 14, 0.6, seed)
            try:
                result = superregularize(g, a, b, eps, d)
            except IrregularPairError as e:
                self.assertEqual(e.report.verdict, RegularityVerdict.NO, f"seed={seed}")
                continue
            self.assertLessEqual(len(result.removed_a), eps * 14)
            self.assertLessEqual(len(result.removed_b), eps * 14)
            check = check_super_regular(g, result.side_a, result.side_b, 2 * eps, max(0, d - 3 * eps), CheckMode.EXACT)
            self.assertTrue(check.holds, f"seed={seed}")
            passed += 1
        self.assertGreaterEqual(passed, 95)


class HallTestCase(SimpleTestCase):
    """Tests para la dicotomía de Hall"""

    def assert_dichotomy(self, g: Graph, a, b):
        result = hall_perfect_matching(g, a, b)
        has_perfect = any(all(g.has_edge(u, v) for u, v in zip(sorted(a), perm)) for perm in permutations(sorted(b)))
        self.assertEqual(result.perfect, has_perfect)
        if result.perfect:
            self.assertEqual(set(result.matching), set(a))
            self.assertEqual(set(result.matching.values()), set(b))
            self.assertTrue(all(g.has_edge(u, v) for u, v in result.matching.items()))
        else:
            self.assertTrue(result.violator <= frozenset(a))
            self.assertTrue(is_hall_violator(g, result.violator, b))

    def test_examples(self):
        """Test: K_{5,5} tiene emparejamiento; un vértice aislado es el violador"""
        self.assertTrue(hall_perfect_matching(complete_bipartite(5, 5), range(5), range(5, 10)).perfect)
        result = hall_perfect_matching(without_edges_at(complete_bipartite(5, 5), 3), range(5), range(5, 10))
        self.assertFalse(result.perfect)
        self.assertEqual(result.violator, frozenset({3}))
        self.assertEqual(neighbourhood(complete_bipartite(5, 5), {3}, range(5, 10)), frozenset(range(5, 10)))

    def test_unequal_sides(self):
        """Test: |A| ≠ |B| es un error"""
        with self.assertRaises(LabError):
            hall_perfect_matching(complete_bipartite(2, 3), range(2), range(2, 5))

    def test_exhaustive_3x3(self):
        """Test: todos los bipartitos con |A| = |B| = 3"""
        for bits in range(1 << 9):
            self.assert_dichotomy(bipartite_from_bits(3, bits), range(3), range(3, 6))

    @tag("slow")
    def test_exhaustive_4x4(self):
        """Test: todos los bipartitos con |A| = |B| = 4"""
        for bits in range(1 << 16):
            self.assert_dichotomy(bipartite_from_bits(4, bits), range(4), range(4, 8))

    def test_seeded_instances(self):
        """Test: 500 pares aleatorios 7×7 contra max_weight_matching de networkx"""
        for seed in range(500):
            g, a, b = random_bipartite_pair(7, 7, 0.25, seed)
            result = hall_perfect_matching(g, a, b)
            oracle = nx.max_weight_matching(g.to_networkx(), maxcardinality=True)
            self.assertEqual(result.perfect, len(oracle) == 7, f"seed={seed}")
            if not result.perfect:
                self.assertTrue(is_hall_violator(g, result.violator, b))


class StarTilingTestCase(SimpleTestCase):
    """Tests para el tiling voraz con estrellas"""

    def test_complete_graph(self):
        """Test: K_{t+1} es una sola estrella"""
        result = greedy_star_tiling(complete(4), 3)
        self.assertEqual(len(result.stars), 1)
        self.assertFalse(result.uncovered)
        self.assertTrue(result.within_guarantee)
        self.assertEqual(result.tiling(complete(4)).size, 1)

    def test_path(self):
        """Test: P5 con t=1 deja un vértice sin cubrir"""
        result = greedy_star_tiling(path(5), 1)
        self.assertEqual(len(result.stars), 2)
        self.assertEqual(len(result.uncovered), 1)

    def test_low_min_degree_may_fail(self):
        """Test: una estrella grande con t=1 deja casi todo sin cubrir"""
        result = greedy_star_tiling(star(10), 1, "0.1")
        self.assertEqual(len(result.uncovered), 9)
        self.assertFalse(result.within_guarantee)

    def test_large_t(self):
        """Test: t = 25 no depende del tope de orden de los patrones"""
        host = complete(26)
        result = greedy_star_tiling(host, 25)
        self.assertEqual(len(result.stars), 1)
        self.assertFalse(result.uncovered)
        self.assertEqual(result.pattern.order, 26)
        self.assertFalse(tiling_problems(result.tiling(host), host, result.pattern))
        self.assertEqual(len(greedy_star_tiling(complete(21), 20).stars), 1)

    def test_invalid_t(self):
        """Test: t < 1 es un error"""
        with self.assertRaises(LabError):
            greedy_star_tiling(complete(3), 0)

    @tag("slow")
    def test_min_degree_hosts(self):
        """Test: n=200, t=3, δ ≥ n/4 + 10 deja ≤ 0.1·n sin cubrir en al menos 45 de 50 semillas"""
        good = 0
        for seed in range(50):
            host = min_degree_host(200, 3, 10, seed)
            result = greedy_star_tiling(host, 3, "0.1")
            self.assertFalse(tiling_problems(result.tiling(host), host, result.pattern))
            good += result.within_guarantee
        self.assertGreaterEqual(good, 45)


class PropertiesTestCase(SimpleTestCase):
    """Tests para F_H, F'_H y F_H evitando copias"""

    def test_F_H(self):
        """Test: K6 cumple F_K3(1/2); C6 no, con testigo sin triángulos"""
        self.assertTrue(check_F_H(complete(6), K3, "1/2"))
        report = check_F_H(cycle(6), K3, "1/2")
        self.assertFalse(report)
        (subset,) = report.witness
        self.assertEqual(len(subset), 3)

    def test_F_H_sampled_witness(self):
        """Test: el contraejemplo muestreado se verifica"""
        report = check_F_H(cycle(8), K3, "1/2", mode=PropertyMode.SAMPLED, trials=50, seed=1)
        self.assertFalse(report.holds)
        self.assertFalse(report.one_sided)
        sampled = check_F_H(complete(7), K3, "1/2", mode=PropertyMode.SAMPLED, trials=30)
        self.assertTrue(sampled.one_sided)

    def test_F_H_cap(self):
        """Test: demasiados subconjuntos en modo exacto es un error"""
        with self.assertRaises(EnumerationCapError):
            check_F_H(complete(30), K3, "1/2", cap=1000)

    def test_F_H_prime(self):
        """Test: K6 cumple F'_K3(1/3); dos triángulos disjuntos no cumplen F'_K3(1/2)"""
        self.assertTrue(check_F_H_prime(complete(6), K3, "1/3"))
        report = check_F_H_prime(disjoint_union(complete(3), complete(3)), K3, "1/2")
        self.assertFalse(report)
        self.assertEqual(report.witness, (frozenset({0, 1, 2}), frozenset({3, 4, 5})))

    def test_F_H_avoiding(self):
        """Test: sin prohibidas es F_H; con triángulos de K4 prohibidos falla"""
        for g in (complete(6), cycle(6)):
            self.assertEqual(check_F_H_avoiding(g, K3, "1/2", []).holds, check_F_H(g, K3, "1/2").holds)
        triangles = [(set(t), {(t[0], t[1]), (t[0], t[2]), (t[1], t[2])}) for t in combinations(range(4), 3)]
        self.assertFalse(check_F_H_avoiding(complete(4), K3, "1/2", triangles))
        report = check_F_H_avoiding(complete(4), K3, "3/4", triangles[:1])
        self.assertFalse(report)
        self.assertEqual(report.witness, (frozenset({0, 1, 2}),))
        self.assertTrue(check_F_H_avoiding(complete(4), K3, "1", triangles[:1]))


class HSetTestCase(SimpleTestCase):
    """Tests para la clasificación de h-conjuntos"""

    def test_complete_cross_layer(self):
        """Test: con capa cruzada completa todos los h-conjuntos son buenos"""
        cross = complete_bipartite(5, 5)
        classes = classify_h_sets(cross, Graph(10), range(5), range(5, 10), complete(2), "1/2")
        self.assertEqual(len(classes), 10)
        self.assertTrue(all(c.good and not c.excellent for c in classes))

    def test_zero_cross_degree_is_bad(self):
        """Test: un vértice sin vecinos cruzados hace malo a su h-conjunto"""
        cross = without_edges_at(complete_bipartite(5, 5), 7)
        layer = complete(10)
        for c in classify_h_sets(cross, layer, range(5), range(5, 10), complete(2), "1/10"):
            self.assertEqual(c.good, 7 not in c.members)
            self.assertEqual(c.excellent, c.good)
            self.assertTrue(c.good == (c.common_nbhd_size >= Fraction(1, 10) * 5))

    def test_good_count_on_dense_pairs(self):
        """Test: al menos (1−4ε)·C(14,2) 2-conjuntos buenos en 90 de 100 semillas"""
        d1 = Fraction(2, 5) ** 2 / 36
        hits = 0
        for seed in range(100):
            instance = pair_completion_instance(14, 14, 0.9, 0.3, seed, eps=Fraction(1, 20), d=Fraction(2, 5))
            self.assertTrue(instance.super_regular.holds)
            classes = classify_h_sets(
                instance.cross, instance.random_layer, instance.side_s, instance.side_t, complete(2), d1
            )
            self.assertTrue(all(c.good for c in classes if c.excellent))
            hits += sum(c.good for c in classes) >= (1 - 4 * Fraction(1, 20)) * math.comb(14, 2)
        self.assertGreaterEqual(hits, 90)


class PairCompletionTestCase(SimpleTestCase):
    """Tests para completar un par a un tiling perfecto"""

    def test_pair_host(self):
        """Test: G* ignora aristas cruzadas fuera de S–T y aristas aleatorias fuera de S ∪ T"""
        cross = Graph(6, frozenset({(0, 2), (0, 1), (4, 5)}))
        layer = Graph(6, frozenset({(0, 1), (3, 4)}))
        host = pair_host(cross, layer, {0, 1}, {2, 3})
        self.assertEqual(host.edges, frozenset({(0, 2), (0, 1)}))

    def test_k2_complete_cross(self):
        """Test: K2 con |S| = |T| y capa cruzada completa es un emparejamiento perfecto"""
        cross = complete_bipartite(4, 4)
        result = complete_pair_tiling(cross, Graph(8), range(4), range(4, 8), K2)
        self.assertTrue(result.found)
        self.assertEqual(result.route, PairRoute.MATCHING)
        self.assertEqual(result.tiling.size, 4)

    def test_k2_uneven_sides(self):
        """Test: |T| − |S| = 2 usa la arista interna de T y Hall para el resto"""
        cross = complete_bipartite(2, 4)
        layer = Graph(6, frozenset({(4, 5)}))
        result = complete_pair_tiling(cross, layer, {0, 1}, {2, 3, 4, 5}, K2)
        self.assertTrue(result.found)
        self.assertEqual(result.route, PairRoute.MATCHING)
        self.assertIn(frozenset({4, 5}), {e.vertices for e in result.tiling.embeddings})
        host = pair_host(cross, layer, {0, 1}, {2, 3, 4, 5})
        self.assertFalse(tiling_problems(result.tiling, host, K2, cover=range(6)))

    def test_divisibility(self):
        """Test: |S ∪ T| no divisible por |H| es un error"""
        with self.assertRaises(PairCompletionError):
            complete_pair_tiling(complete_bipartite(2, 3), Graph(5), range(2), range(2, 5), K2)

    def test_params(self):
        """Test: constantes fuera de (0, 1) se rechazan"""
        with self.assertRaises(PairCompletionError):
            PairCompletionParams.from_settings(eps5="3/2")
        params = PairCompletionParams.from_settings(phi="1/25")
        self.assertEqual(params.phi, Fraction(1, 25))
        self.assertEqual(params.as_dict()["phi"], "1/25")

    def test_typed_copies(self):
        """Test: S-copias de K3 con una arista aleatoria en S"""
        cross = complete_bipartite(3, 3)
        layer = Graph(6, frozenset({(0, 1)}))
        s_copies = enumerate_typed_copies(cross, layer, range(3), range(3, 6), K3, "S")
        self.assertEqual(len(s_copies), 3)
        for copy in s_copies:
            self.assertEqual(len(copy.vertices & {0, 1, 2}), 2)
        self.assertEqual(enumerate_typed_copies(cross, layer, range(3), range(3, 6), K3, "T"), [])
        with self.assertRaises(LabError):
            enumerate_typed_copies(cross, layer, range(3), range(3, 6), K3, "X")

    def test_k3_small_pair(self):
        """Test: K3 en un par denso 12×12 da un certificado válido de S ∪ T"""
        for seed in range(3):
            instance = pair_completion_instance(12, 12, 0.9, 0.5, seed)
            result = complete_pair_tiling(
                instance.cross, instance.random_layer, instance.side_s, instance.side_t, K3, seed=seed
            )
            self.assertTrue(result.found, result.stage_log)
            host = pair_host(instance.cross, instance.random_layer, instance.side_s, instance.side_t)
            self.assertFalse(tiling_problems(result.tiling, host, K3, cover=range(24)))
            self.assertIn(result.route, (PairRoute.STAGED, PairRoute.FALLBACK))

    def test_k3_staged_route(self):
        """Test: K3 en pares super-regulares 30×30 se completa por etapas con 𝒯₂ equilibrado"""
        staged = 0
        for seed in range(5):
            instance = pair_completion_instance(30, 30, 0.9, 0.3, seed, eps="1/20", d="2/5")
            self.assertTrue(instance.super_regular.holds)
            result = complete_pair_tiling(
                instance.cross, instance.random_layer, instance.side_s, instance.side_t, K3, seed=seed
            )
            self.assertTrue(result.found, result.stage_log)
            if result.route != PairRoute.STAGED:
                continue
            staged += 1
            self.assertIn("𝒯₂: 9 S-copias y 9 T-copias", " / ".join(result.stage_log))
            self.assertTrue(result.stage_log[-1].startswith("cierre: 1 T-copias"))
            self.assertFalse([line for line in result.stage_log if line.startswith("fallo")])
        self.assertGreaterEqual(staged, 4)

    def test_stage_failure_falls_back(self):
        """Test: sin aristas aleatorias no hay copias tipadas y la ruta cae al solver exacto"""
        instance = pair_completion_instance(6, 6, 1, 0, 0)
        result = complete_pair_tiling(instance.cross, instance.random_layer, instance.side_s, instance.side_t, K3)
        self.assertEqual(result.route, PairRoute.FALLBACK)
        self.assertTrue(any(line.startswith("fallo:") for line in result.stage_log))
        self.assertEqual(result.status, "none_exists")

    @tag("slow")
    def test_k3_staged_acceptance(self):
        """Test: K3 en pares (0.05, 0.4)-super-regulares 60×60 con capa aleatoria 0.3: ≥ 95 certificados y ≥ 70 por etapas"""
        valid = staged = 0
        for seed in range(100):
            instance = pair_completion_instance(60, 60, 0.9, 0.3, seed, eps="1/20", d="2/5")
            result = complete_pair_tiling(
                instance.cross, instance.random_layer, instance.side_s, instance.side_t, K3, seed=seed
            )
            if result.found:
                host = pair_host(instance.cross, instance.random_layer, instance.side_s, instance.side_t)
                self.assertFalse(tiling_problems(result.tiling, host, K3, cover=range(120)))
                valid += 1
                staged += result.route == PairRoute.STAGED
        self.assertGreaterEqual(valid, 95)
        self.assertGreaterEqual(staged, 70)


class ReductionTestCase(SimpleTestCase):
    """Tests para la reparación de divisibilidad y el grafo reducido"""

    def test_repair_divisibility(self):
        """Test: una copia con un vértice en S₀ y dos en el par siguiente arregla los residuos"""
        pairs, removed = repair_divisibility(complete(9), [({0, 1}, {2, 3}), ({4, 5, 6}, {7, 8})], K3)
        self.assertEqual(removed.size, 1)
        (copy,) = removed.embeddings
        self.assertEqual(len(copy.vertices & {0, 1}), 1)
        for s, t in pairs:
            self.assertEqual((len(s) + len(t)) % 3, 0)

    def test_repair_total_not_divisible(self):
        """Test: un total no divisible por |H| es un error"""
        with self.assertRaises(PairCompletionError):
            repair_divisibility(complete(8), [({0, 1}, {2, 3}), ({4, 5, 6}, {7})], K3)

    def test_reduced_graph(self):
        """Test: sólo el par denso y regular da arista en el grafo reducido"""
        edges = {(u, v) for u in range(4) for v in range(4, 8)}
        host = Graph(12, frozenset(edges))
        reduced = reduced_graph(host, [range(4), range(4, 8), range(8, 12)], "1/4", "1/2")
        self.assertEqual(reduced.graph.edges, frozenset({(0, 1)}))
        self.assertEqual(len(reduced.reports), 3)
        with self.assertRaises(LabError):
            reduced_graph(host, [range(4), range(3, 8)], "1/4", "1/2")


class RegularityApiTestCase(APITestCase):
    """Tests para los endpoints de regularidad"""

    def test_check(self):
        """Test: par completo regular y super-regular por la API"""
        response = self.client.post(
            "/api/regularity/check/",
            {"host": serialize_graph6(complete_bipartite(3, 3)), "side_a": [0, 1, 2], "side_b": [3, 4, 5], "eps": "1/3", "d": "1/2"},
            format="json",
        )
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["regularity"]["verdict"], "yes")
        self.assertTrue(response.data["super_regularity"]["holds"])

    def test_overlapping_sides(self):
        """Test: lados solapados devuelven 400"""
        response = self.client.post(
            "/api/regularity/check/",
            {"host": serialize_graph6(complete(4)), "side_a": [0, 1], "side_b": [1, 2], "eps": "1/4"},
            format="json",
        )
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_hall(self):
        """Test: violador de Hall por la API"""
        g = without_edges_at(complete_bipartite(3, 3), 0)
        response = self.client.post(
            "/api/regularity/hall/", {"host": serialize_graph6(g), "side_a": [0, 1, 2], "side_b": [3, 4, 5]}, format="json"
        )
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertFalse(response.data["perfect"])
        self.assertEqual(response.data["violator"], [0])

    def test_unequal_hall_sides(self):
        """Test: lados de distinto tamaño devuelven 400 con error"""
        response = self.client.post(
            "/api/regularity/hall/",
            {"host": serialize_graph6(complete_bipartite(2, 3)), "side_a": [0, 1], "side_b": [2, 3, 4]},
            format="json",
        )
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn("error", response.data)

    def test_complete_pair(self):
        """Test: completar un par K2 por la API"""
        response = self.client.post(
            "/api/regularity/complete-pair/",
            {
                "cross": serialize_graph6(complete_bipartite(2, 2)),
                "random_layer": serialize_graph6(Graph(4)),
                "side_s": [0, 1],
                "side_t": [2, 3],
                "pattern": "k2",
            },
            format="json",
        )
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["status"], "found")
        self.assertEqual(response.data["route"], "matching")


class RegularityCommandTestCase(SimpleTestCase):
    """Tests para los comandos check_regular, star_tile y complete_pair"""

    def test_check_regular(self):
        """Test: el par partido no es 1/4-regular desde la CLI"""
        g, *_ = split_pair(4)
        with tempfile.TemporaryDirectory() as tmp:
            host = write_graph(g, Path(tmp) / "split.txt")
            out = StringIO()
            call_command("check_regular", "--host", str(host), "--a", "0-7", "--b", "8-15", "--eps", "1/4", stdout=out)
        report = json.loads(out.getvalue())
        self.assertEqual(report["regularity"]["verdict"], "no")

    def test_superregularize_needs_d(self):
        """Test: --superregularize sin --d es un CommandError"""
        with tempfile.TemporaryDirectory() as tmp:
            host = write_graph(complete_bipartite(3, 3), Path(tmp) / "k33.txt")
            with self.assertRaises(CommandError):
                call_command(
                    "check_regular", "--host", str(host), "--a", "0-2", "--b", "3-5", "--eps", "1/4",
                    "--superregularize", stdout=StringIO(),
                )

    def test_star_tile(self):
        """Test: star_tile sobre K4 con t=3"""
        with tempfile.TemporaryDirectory() as tmp:
            host = write_graph(complete(4), Path(tmp) / "k4.txt")
            out = StringIO()
            call_command("star_tile", "--host", str(host), "--t", "3", stdout=out)
        report = json.loads(out.getvalue())
        self.assertEqual(report["uncovered"], 0)
        self.assertTrue(report["within_guarantee"])

    def test_complete_pair_synthetic(self):
        """Test: complete_pair con una instancia sintética K2"""
        out = StringIO()
        call_command("complete_pair", "--synthetic", "6", "--pattern", "k2", "--seed", "1", stdout=out)
        report = json.loads(out.getvalue())
        self.assertEqual(report["status"], "found")
        self.assertEqual(report["size"], 6)
