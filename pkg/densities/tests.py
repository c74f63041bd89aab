import json
import random
from fractions import Fraction
from io import StringIO
from itertools import chain, combinations

import networkx as nx
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from rest_framework import status
from rest_framework.test import APITestCase

from graphs.exceptions import DensityError
from graphs.structures import Graph, complete, cycle, disjoint_union, empty, path, relabel, star

from .invariants import (
    DensityCategory,
    Pattern,
    canonical_edges,
    classify,
    density,
    max_density,
    named_pattern,
    parse_pattern,
    s_value,
    star_pattern,
    threshold_formulas,
    triangle_with_pendant,
    vertex_max_density,
)

PROPERTY_SETTINGS = settings(
    max_examples=80,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)


def atlas_corpus():
    """Todos los grafos del atlas con 2 a 7 vértices (1251 grafos)."""
    return [Graph.from_networkx(g) for g in nx.graph_atlas_g() if g.number_of_nodes() >= 2]


def oracle_profile(g: nx.Graph) -> dict:
    """
    Oráculo independiente: recorre subconjuntos con ``networkx.subgraph`` y
    compara con los predicados de las definiciones.
    """
    nodes = sorted(g.nodes())
    n = len(nodes)
    d = Fraction(g.number_of_edges(), n - 1)
    values = []
    for size in range(2, n + 1):
        for subset in combinations(nodes, size):
            e = g.subgraph(subset).number_of_edges()
            values.append((subset, e, Fraction(e, size - 1)))

    d_star = max(v for _, _, v in values)
    witness = next(s for s, _, v in values if v == d_star)
    d_star_v = [max(v for s, _, v in values if x in s) for x in nodes]
    s_v = [min(e for s, e, v in values if x in s and v == d_star_v[x]) for x in nodes]
    strictly = all(v < d for s, _, v in values if len(s) < n)
    if strictly:
        category = DensityCategory.STRICTLY_BALANCED
    elif d_star == d:
        category = DensityCategory.BALANCED_NOT_STRICTLY
    elif all(x == d_star for x in d_star_v):
        category = DensityCategory.VERTEX_BALANCED_NOT_BALANCED
    else:
        category = DensityCategory.NON_VERTEX_BALANCED
    return {
        "d": d,
        "d_star": d_star,
        "witness": frozenset(witness),
        "d_star_v": tuple(d_star_v),
        "s_v": tuple(s_v),
        "category": category.value,
    }


def powerset(items):
    items = list(items)
    return chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))


class DensityExamplesTestCase(SimpleTestCase):
    """Tests para los ejemplos de d, d*, d*(v) y s_v"""

    def test_density(self):
        """Test: d(K2)=1, d(K3)=3/2, d(K_{1,3})=1"""
        self.assertEqual(density(complete(2)), 1)
        self.assertEqual(density(complete(3)), Fraction(3, 2))
        self.assertEqual(density(star(3)), 1)
        with self.assertRaises(DensityError):
            density(empty(1))

    def test_max_density(self):
        """Test: d*(K4)=2 con todo el conjunto; triángulo con colgante 3/2 en {0,1,2}"""
        self.assertEqual(max_density(complete(4)), (2, frozenset(range(4))))
        self.assertEqual(max_density(triangle_with_pendant()), (Fraction(3, 2), frozenset({0, 1, 2})))
        self.assertEqual(max_density(complete(2)), (1, frozenset({0, 1})))

    def test_vertex_max_density(self):
        """Test: d*(3, triángulo con colgante)=4/3, d*(0)=3/2, K3 simétrico"""
        h = triangle_with_pendant()
        self.assertEqual(vertex_max_density(h, 3), Fraction(4, 3))
        self.assertEqual(vertex_max_density(h, 0), Fraction(3, 2))
        for v in range(3):
            self.assertEqual(vertex_max_density(complete(3), v), Fraction(3, 2))

    def test_s_value(self):
        """Test: s_v de K3, centro de K_{1,3} y K2"""
        self.assertEqual(s_value(complete(3), 1), 3)
        self.assertEqual(s_value(star(3), 0), 1)
        self.assertEqual(s_value(complete(2), 0), 1)
        self.assertEqual(s_value(triangle_with_pendant(), 3), 4)


class ClassificationTestCase(SimpleTestCase):
    """Tests para la clasificación de balance"""

    def test_named_classifications(self):
        """Test: K2..C5 estrictamente balanceados, K_{1,3} y P3 balanceados no estrictos"""
        for name in ["k2", "k3", "k4", "c4", "c5"]:
            self.assertEqual(named_pattern(name).profile.category, DensityCategory.STRICTLY_BALANCED, name)
        for name in ["k13", "p3"]:
            profile = named_pattern(name).profile
            self.assertEqual(profile.category, DensityCategory.BALANCED_NOT_STRICTLY, name)
            self.assertTrue(profile.vertex_balanced)

    def test_triangle_with_pendant(self):
        """Test: triángulo con colgante es no vertex-balanced con d*=3/2, d*(colgante)=4/3"""
        profile = classify(triangle_with_pendant())
        self.assertEqual(profile.category, DensityCategory.NON_VERTEX_BALANCED)
        self.assertEqual(profile.d_star, Fraction(3, 2))
        self.assertEqual(profile.d_star_v[3], Fraction(4, 3))
        self.assertEqual(profile.s, 4)
        self.assertFalse(profile.s_in_conjecture_scope)
        self.assertEqual(profile.applicable_threshold, "gerke_mcdowell")

    def test_vertex_balanced_not_balanced(self):
        """Test: dos triángulos unidos por una arista"""
        g = disjoint_union(complete(3), complete(3))
        g = Graph(6, g.edges | {(2, 3)})
        profile = classify(g)
        self.assertEqual(profile.category, DensityCategory.VERTEX_BALANCED_NOT_BALANCED)
        self.assertEqual(profile.d, Fraction(7, 5))
        self.assertEqual(profile.applicable_threshold, "jkv_conjecture")

    def test_strictly_balanced_s_equals_edges(self):
        """Test: para H estrictamente balanceado s = e(H)"""
        for h in [complete(2), complete(3), complete(4), cycle(4), cycle(5)]:
            profile = classify(h)
            self.assertEqual(profile.s, h.edge_count)
            self.assertEqual(profile.applicable_threshold, "jkv")

    def test_profile_as_dict(self):
        """Test: el JSON usa racionales exactos como texto"""
        report = classify(triangle_with_pendant()).as_dict()
        self.assertEqual(report["d"], "4/3")
        self.assertEqual(report["d_star"], "3/2")
        self.assertEqual(report["d_star_v"]["3"], "4/3")
        self.assertEqual(report["witness_subset"], [0, 1, 2])
        json.dumps(report)

    def test_golden_suite_against_oracle(self):
        """Test: classify coincide con el oráculo en todos los grafos de 2 a 7 vértices"""
        corpus = atlas_corpus()
        self.assertGreaterEqual(len(corpus), 500)
        for g in corpus:
            expected = oracle_profile(g.to_networkx())
            profile = classify(g)
            self.assertEqual(profile.d, expected["d"])
            self.assertEqual(profile.d_star, expected["d_star"])
            self.assertEqual(profile.witness_subset, expected["witness"])
            self.assertEqual(profile.d_star_v, expected["d_star_v"])
            self.assertEqual(profile.s_v, expected["s_v"])
            self.assertEqual(profile.category, expected["category"], g.sorted_edges)
            self.assertEqual(profile.d_star, max(profile.d_star_v))
            self.assertEqual(profile.s, max(profile.s_v))

    def test_implication_chain(self):
        """Test: estrictamente balanceado ⇒ balanceado ⇒ vertex-balanced"""
        for g in atlas_corpus():
            profile = classify(g)
            if profile.strictly_balanced:
                self.assertTrue(profile.balanced)
            if profile.balanced:
                self.assertTrue(profile.vertex_balanced)
            if profile.category == DensityCategory.NON_VERTEX_BALANCED:
                self.assertFalse(profile.balanced)
                self.assertFalse(profile.strictly_balanced)

    def test_induced_subgraphs_suffice(self):
        """Test: d(H') ≤ d(H[V(H')]) para todo subgrafo H' (exhaustivo hasta 5 vértices, muestreado hasta 7)"""
        rng = random.Random(2024)
        for g in atlas_corpus():
            nxg = g.to_networkx()
            exhaustive = g.n <= 5
            for size in range(2, g.n + 1):
                for subset in combinations(range(g.n), size):
                    induced_edges = list(nxg.subgraph(subset).edges())
                    bound = Fraction(len(induced_edges), size - 1)
                    if exhaustive:
                        edge_subsets = powerset(induced_edges)
                    else:
                        edge_subsets = [rng.sample(induced_edges, rng.randint(0, len(induced_edges))) for _ in range(3)]
                    for edges in edge_subsets:
                        self.assertLessEqual(Fraction(len(edges), size - 1), bound)

    @PROPERTY_SETTINGS
    @given(st.integers(min_value=2, max_value=1252), st.randoms(use_true_random=False))
    def test_isomorphism_invariance(self, index, rnd):
        """Test: d* y la categoría no dependen del etiquetado"""
        g = Graph.from_networkx(nx.graph_atlas(index))
        permutation = list(range(g.n))
        rnd.shuffle(permutation)
        a, b = classify(g), classify(relabel(g, permutation))
        self.assertEqual(a.d_star, b.d_star)
        self.assertEqual(a.category, b.category)
        self.assertEqual(a.s, b.s)
        self.assertEqual(canonical_edges(g), canonical_edges(relabel(g, permutation)))


class ThresholdFormulasTestCase(SimpleTestCase):
    """Tests para las fórmulas de umbral"""

    def test_threshold_examples(self):
        """Test: p_gm(K2, n=100)=0.01, p_gm(K3, n=10000)≈2.154e-3, c=0 da 0"""
        self.assertAlmostEqual(threshold_formulas(complete(2), 100, 1).p_gm, 0.01)
        self.assertAlmostEqual(threshold_formulas(complete(3), 10000, 1).p_gm, 2.154e-3, places=6)
        self.assertEqual(threshold_formulas(complete(3), 100, 0).p_perturbed, 0.0)
        self.assertEqual(threshold_formulas(complete(3), 3, 1000).p_perturbed, 1.0)

    def test_threshold_errors(self):
        """Test: patrón sin aristas o n < 3"""
        with self.assertRaises(DensityError):
            threshold_formulas(empty(3), 10, 1)
        with self.assertRaises(DensityError):
            threshold_formulas(complete(3), 2, 1)


class PatternTestCase(SimpleTestCase):
    """Tests para patrones con nombre y H − x"""

    def test_pattern_requires_edge(self):
        """Test: un patrón de tiling necesita aristas; la clasificación no"""
        with self.assertRaises(DensityError):
            Pattern.from_graph(empty(3))
        self.assertEqual(Pattern.from_graph(empty(3), require_edge=False).profile.d_star, 0)

    def test_minus_vertex(self):
        """Test: H' = H − x con el vértice de grado máximo"""
        h = Pattern.from_graph(triangle_with_pendant())
        self.assertEqual(h.default_removed_vertex(), 2)
        hprime, index_map = h.minus_vertex(2)
        self.assertEqual(index_map, (0, 1, 3))
        self.assertEqual(hprime.edge_count, 1)
        k3 = named_pattern("k3")
        self.assertEqual(k3.default_removed_vertex(), 0)
        self.assertEqual(k3.minus_vertex(0)[0], complete(2))

    def test_parse_pattern(self):
        """Test: nombres, familias y errores"""
        self.assertEqual(parse_pattern("K_{1,3}").graph, star(3))
        self.assertEqual(parse_pattern("p4").graph, path(4))
        self.assertEqual(parse_pattern("k5").order, 5)
        with self.assertRaises(DensityError):
            parse_pattern("dodecaedro")

    def test_star_pattern_matches_classify(self):
        """Test: el perfil cerrado de K_{1,t} coincide con la enumeración de subconjuntos"""
        for t in range(1, 9):
            self.assertEqual(star_pattern(t).profile, classify(star(t)))
        self.assertTrue(star_pattern(1).profile.strictly_balanced)

    def test_large_star_pattern(self):
        """Test: K_{1,25} no pasa por el tope de orden de classify"""
        with self.assertRaises(DensityError):
            classify(star(25))
        pattern = named_pattern("star25")
        self.assertEqual(pattern.order, 26)
        self.assertEqual(pattern.profile.category, DensityCategory.BALANCED_NOT_STRICTLY)
        self.assertEqual(pattern.profile.d_star, 1)
        with self.assertRaises(DensityError):
            star_pattern(0)


class ClassifyApiTestCase(APITestCase):
    """Tests para el endpoint de clasificación"""

    def test_classify_graph_text(self):
        """Test: clasificación de un grafo enviado como texto"""
        response = self.client.post("/api/densities/classify/", {"graph": "3\n0 1\n1 2\n0 2\n", "n": 100}, format="json")
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["category"], "StrictlyBalanced")
        self.assertIn("thresholds", response.data)
        self.assertEqual(response.data["canonical_edges"], [[0, 1], [0, 2], [1, 2]])

    def test_classify_requires_input(self):
        """Test: sin grafo ni patrón devuelve 400"""
        response = self.client.post("/api/densities/classify/", {}, format="json")
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)


class ClassifyCommandTestCase(SimpleTestCase):
    """Tests para el comando classify"""

    def test_classify_command(self):
        """Test: salida JSON con los campos del perfil"""
        out = StringIO()
        call_command("classify", "--graph6", "Cs", stdout=out)
        report = json.loads(out.getvalue())
        for key in ["d", "d_star", "d_star_v", "s_v", "s", "category", "witness_subset"]:
            self.assertIn(key, report)

    def test_classify_command_error(self):
        """Test: patrón desconocido produce CommandError"""
        with self.assertRaises(CommandError):
            call_command("classify", "--pattern", "nada", stdout=StringIO())
