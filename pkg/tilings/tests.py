import json
import tempfile
from io import StringIO
from itertools import combinations, permutations
from pathlib import Path

import networkx as nx
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, tag
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from rest_framework import status
from rest_framework.test import APITestCase

from densities.invariants import Pattern, named_pattern
from graphs.exceptions import LabError
from graphs.formats import serialize_graph6, write_graph
from graphs.random_models import Seed, sample_gnp, sample_gnp_coupled
from graphs.structures import Graph, complete, complete_bipartite, cycle, empty, petersen

from .certificates import Tiling, is_valid_tiling, tiling_problems
from .copies import CopyIndex, Embedding, copy_key, enumerate_copies
from .solver import (
    ExactCover,
    TilingStatus,
    almost_perfect_coverage,
    max_tiling_exact,
    max_tiling_greedy,
    perfect_tiling,
)

PROPERTY_SETTINGS = settings(
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)

K2 = named_pattern("k2")
K3 = named_pattern("k3")
P3 = named_pattern("p3")


def contains_copy(g: Graph, part, h: Graph) -> bool:
    return any(all(g.has_edge(perm[x], perm[y]) for x, y in h.edges) for perm in permutations(part))


def oracle_perfect_tiling(g: Graph, h: Graph) -> bool:
    """Oráculo por particiones: recorre todas las particiones de V(g) en bloques de |h|."""
    if g.n % h.n:
        return False

    def search(remaining):
        if not remaining:
            return True
        first, rest = remaining[0], remaining[1:]
        for others in combinations(rest, h.n - 1):
            block = (first,) + others
            if contains_copy(g, block, h):
                if search([v for v in rest if v not in others]):
                    return True
        return False

    return search(list(range(g.n)))


def oracle_max_triangles(g: Graph) -> int:
    triangles = [t for t in combinations(range(g.n), 3) if contains_copy(g, t, complete(3))]
    best = 0
    for k in range(1, g.n // 3 + 1):
        if any(len(set().union(*chosen)) == 3 * k for chosen in combinations(triangles, k)):
            best = k
    return best


def small_atlas(max_n=6):
    return [Graph.from_networkx(g) for g in nx.graph_atlas_g() if 1 <= g.number_of_nodes() <= max_n]


def assert_certificate(test, result, host, pattern):
    if result.status == TilingStatus.FOUND:
        test.assertEqual(tiling_problems(result.tiling, host, pattern, perfect=True), [])
        test.assertEqual(host.n % pattern.order, 0)


class CopiesTestCase(SimpleTestCase):
    """Tests para la enumeración de copias"""

    def test_copy_counts(self):
        """Test: 4 triángulos en K4, ninguno en C5, 3 por el vértice 0 de K4"""
        self.assertEqual(len(enumerate_copies(complete(4), K3)), 4)
        self.assertEqual(len(enumerate_copies(cycle(5), K3)), 0)
        self.assertEqual(len(enumerate_copies(complete(4), K3, through=0)), 3)

    def test_automorphism_dedup(self):
        """Test: copias distintas de P3 en K3 se distinguen por sus aristas"""
        copies = enumerate_copies(complete(3), P3)
        self.assertEqual(len(copies), 3)
        self.assertEqual(len({c.key for c in copies}), 3)
        self.assertEqual(len(enumerate_copies(complete(4), named_pattern("c4"))), 3)

    def test_within_and_through(self):
        """Test: restricción a un subconjunto y vértice fuera de 'within'"""
        copies = enumerate_copies(complete(5), K3, within=[0, 1, 2, 3])
        self.assertEqual(len(copies), 4)
        self.assertTrue(all(max(c.image) <= 3 for c in copies))
        with self.assertRaises(LabError):
            enumerate_copies(complete(5), K3, within=[0, 1, 2], through=4)

    def test_copies_preserve_edges(self):
        """Test: cada arista de H cae en una arista del anfitrión"""
        g = sample_gnp(12, 0.5, Seed(3))
        for copy in enumerate_copies(g, P3):
            self.assertTrue(all(g.has_edge(u, v) for u, v in copy.edges))
            self.assertEqual(len(copy.vertices), 3)

    def test_copy_key_and_index(self):
        """Test: copy_key acepta pares (vértices, aristas) y CopyIndex agrupa por vértice"""
        emb = Embedding(K3, (2, 0, 1))
        self.assertEqual(copy_key(emb), copy_key(([0, 1, 2], [(1, 0), (2, 1), (0, 2)])))
        index = CopyIndex(complete(4), K3)
        self.assertEqual(len(index), 4)
        self.assertEqual(len(index.by_vertex[0]), 3)
        self.assertEqual(index.live_through(0, 1 << 1), [i for i in index.by_vertex[0] if 1 not in index.copies[i].image])
        self.assertIsNone(index.any_inside(0b0011))
        self.assertIsNotNone(index.any_inside(0b0111))


class CertificateTestCase(SimpleTestCase):
    """Tests para el validador independiente de certificados"""

    def test_detects_problems(self):
        """Test: solapamiento, arista ausente y cobertura incompleta"""
        host = Graph(6, frozenset({(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5)}))
        overlapping = Tiling((Embedding(K3, (0, 1, 2)), Embedding(K3, (2, 3, 4))))
        self.assertTrue(any("no disjuntas" in p for p in tiling_problems(overlapping, host, K3)))
        missing_edge = Tiling((Embedding(K3, (3, 4, 5)),))
        self.assertTrue(any("falta la arista" in p for p in tiling_problems(missing_edge, host, K3)))
        partial = Tiling((Embedding(K3, (0, 1, 2)),))
        self.assertTrue(is_valid_tiling(partial, host, K3))
        self.assertFalse(is_valid_tiling(partial, host, K3, perfect=True))
        self.assertTrue(is_valid_tiling(partial, host, K3, cover=[0, 1, 2]))

    def test_tiling_accounting(self):
        """Test: covered es la unión de imágenes y coverage = |H|·tamaño"""
        tiling = Tiling.from_embeddings([Embedding(K3, (3, 4, 5)), Embedding(K3, (0, 1, 2))])
        self.assertEqual(tiling.vertex_lists(), [[0, 1, 2], [3, 4, 5]])
        self.assertEqual(tiling.covered, frozenset(range(6)))
        self.assertEqual(tiling.coverage, 3 * tiling.size)


class ExactCoverTestCase(SimpleTestCase):
    """Tests para el Algorithm X con diccionarios"""

    def test_select_deselect_restores_state(self):
        """Test: seleccionar y deshacer deja las columnas como estaban"""
        rows = {0: (0, 1), 1: (1, 2), 2: (2, 3), 3: (0, 3)}
        cover = ExactCover(range(4), rows)
        before = {c: set(r) for c, r in cover.cols.items()}
        removed = cover.select(1)
        self.assertNotIn(1, cover.cols)
        cover.deselect(1, removed)
        self.assertEqual(cover.cols, before)
        dropped = cover.drop(0)
        cover.undrop(0, dropped)
        self.assertEqual(cover.cols, before)

    def test_solve_both_branchings(self):
        """Test: las dos reglas de ramificación encuentran cobertura o demuestran que no hay"""
        rows = {0: (0, 1), 1: (1, 2), 2: (2, 3), 3: (0, 3)}
        for branching in ["lowest", "fewest"]:
            solution = ExactCover(range(4), rows).solve(branching=branching)
            self.assertEqual(sorted(v for r in solution for v in rows[r]), [0, 1, 2, 3])
            self.assertIsNone(ExactCover(range(3), {0: (0, 1), 1: (1, 2)}).solve(branching=branching))


class PerfectTilingTestCase(SimpleTestCase):
    """Tests para la decisión exacta de tilings perfectos"""

    def test_examples(self):
        """Test: K6/K3 encontrado, K_{3,9}/K3 no existe, C6/K2 encontrado"""
        result = perfect_tiling(complete(6), K3)
        self.assertEqual(result.status, TilingStatus.FOUND)
        self.assertEqual(result.tiling.size, 2)
        self.assertEqual(perfect_tiling(complete_bipartite(3, 9), K3).status, TilingStatus.NONE_EXISTS)
        matching = perfect_tiling(cycle(6), K2)
        self.assertEqual(matching.status, TilingStatus.FOUND)
        self.assertEqual(matching.tiling.size, 3)

    def test_divisibility_short_circuit(self):
        """Test: |H| no divide |G| ⇒ NoneExists sin explorar nodos"""
        result = perfect_tiling(complete(7), K3)
        self.assertEqual(result.status, TilingStatus.NONE_EXISTS)
        self.assertEqual(result.nodes_explored, 0)

    def test_budget_exhaustion_is_unknown(self):
        """Test: presupuesto agotado devuelve Unknown, no un error"""
        result = perfect_tiling(complete(6), K3, budget=1)
        self.assertEqual(result.status, TilingStatus.UNKNOWN)
        self.assertIsNone(result.tiling)
        self.assertEqual(result.as_dict()["status"], "unknown")

    def test_zero_budget_is_unknown(self):
        """Test: budget = 0 no se confunde con el presupuesto por defecto"""
        self.assertEqual(perfect_tiling(complete(6), K3, budget=0).status, TilingStatus.UNKNOWN)
        self.assertEqual(perfect_tiling(complete(6), K3, budget=None).status, TilingStatus.FOUND)
        result = max_tiling_exact(petersen(), K3, budget=0)
        self.assertFalse(result.exact)
        self.assertEqual(result.size, 0)

    def test_requires_edges(self):
        """Test: patrón sin aristas es un error"""
        with self.assertRaises(LabError):
            perfect_tiling(complete(4), Pattern(empty(2), K2.profile))

    def test_exhaustive_agreement_small_graphs(self):
        """Test: coincide con el oráculo de particiones en todos los grafos de ≤ 6 vértices"""
        for g in small_atlas(6):
            for h in [K2, K3, P3]:
                result = perfect_tiling(g, h)
                self.assertNotEqual(result.status, TilingStatus.UNKNOWN)
                self.assertEqual(result.found, oracle_perfect_tiling(g, h.graph), (g.sorted_edges, str(h)))
                assert_certificate(self, result, g, h)

    def test_random_gnp_agreement(self):
        """Test: 200 G(9, 1/2) sembrados, H=K3, cero desacuerdos"""
        root = Seed(20240101)
        for i in range(200):
            g = sample_gnp(9, 0.5, root.derive("oracle", i))
            result = perfect_tiling(g, K3)
            self.assertEqual(result.found, oracle_perfect_tiling(g, complete(3)), i)
            assert_certificate(self, result, g, K3)

    def test_perfect_matching_special_case(self):
        """Test: perfect_tiling con K2 coincide con un emparejamiento máximo"""
        graphs = small_atlas(6) + [sample_gnp(10, 0.3, Seed(5).derive(i)) for i in range(40)]
        for g in graphs:
            matching = nx.max_weight_matching(g.to_networkx(), maxcardinality=True)
            self.assertEqual(perfect_tiling(g, K2).found, 2 * len(matching) == g.n)

    @PROPERTY_SETTINGS
    @given(st.integers(min_value=0, max_value=10_000), st.data())
    def test_monotone_under_edge_addition(self, seed, data):
        """Test: Found se conserva al añadir una arista"""
        g = sample_gnp(9, 0.45, Seed(seed))
        if not perfect_tiling(g, K3).found:
            return
        missing = [(u, v) for u in range(9) for v in range(u + 1, 9) if not g.has_edge(u, v)]
        if not missing:
            return
        extra = data.draw(st.sampled_from(missing))
        self.assertTrue(perfect_tiling(Graph(9, g.edges | {extra}), K3).found)

    def test_monotone_along_coupling(self):
        """Test: con muestras acopladas, Found en p implica Found en todo p mayor"""
        grid = [0.2, 0.35, 0.5, 0.65, 0.8]
        for i in range(40):
            found = [perfect_tiling(g, K3).found for g in sample_gnp_coupled(12, grid, Seed(11).derive(i))]
            first = found.index(True) if True in found else len(found)
            self.assertTrue(all(found[first:]), (i, found))


class MaxTilingTestCase(SimpleTestCase):
    """Tests para los tilings máximos exacto y voraz"""

    def test_exact_examples(self):
        """Test: Petersen no tiene triángulos y K7 admite 2"""
        self.assertEqual(max_tiling_exact(petersen(), K3).size, 0)
        result = max_tiling_exact(complete(7), K3)
        self.assertEqual(result.size, 2)
        self.assertTrue(result.exact)

    def test_exact_agrees_with_oracle_on_six_vertices(self):
        """Test: máximo de triángulos disjuntos en todos los grafos de 6 vértices"""
        for g in [x for x in small_atlas(6) if x.n == 6]:
            result = max_tiling_exact(g, K3)
            self.assertTrue(result.exact)
            self.assertEqual(result.size, oracle_max_triangles(g), g.sorted_edges)
            self.assertTrue(is_valid_tiling(result.tiling, g, K3))

    def test_exact_matching_size(self):
        """Test: con H=K2 el máximo es el emparejamiento máximo"""
        for i in range(30):
            g = sample_gnp(11, 0.25, Seed(9).derive(i))
            matching = nx.max_weight_matching(g.to_networkx(), maxcardinality=True)
            self.assertEqual(max_tiling_exact(g, K2).size, len(matching))

    def test_greedy_examples(self):
        """Test: el voraz cubre K6 y devuelve vacío sin triángulos"""
        self.assertEqual(max_tiling_greedy(complete(6), K3).coverage, 6)
        self.assertEqual(max_tiling_greedy(complete_bipartite(4, 4), K3).size, 0)

    def test_greedy_is_maximal(self):
        """Test: ninguna copia cabe en los vértices que el voraz deja libres"""
        for i in range(30):
            g = sample_gnp(12, 0.4, Seed(4).derive(i))
            tiling = max_tiling_greedy(g, K3, seed=i, passes=1)
            free = [v for v in range(g.n) if v not in tiling.covered]
            if len(free) >= 3:
                self.assertEqual(enumerate_copies(g, K3, within=free), [])

    def test_greedy_close_to_exact(self):
        """Test: cobertura voraz ≥ máximo exacto − |H| en 100 anfitriones de 10 vértices"""
        root = Seed(77)
        for i in range(100):
            g = sample_gnp(10, 0.5, root.derive(i))
            greedy = max_tiling_greedy(g, K3, seed=i)
            exact = max_tiling_exact(g, K3)
            self.assertGreaterEqual(greedy.coverage, exact.tiling.coverage - K3.order, i)
            self.assertLessEqual(greedy.size, exact.size)

    def test_greedy_reproducible(self):
        """Test: misma semilla, mismo tiling"""
        g = sample_gnp(15, 0.4, Seed(1))
        self.assertEqual(
            max_tiling_greedy(g, K3, seed=5).vertex_lists(),
            max_tiling_greedy(g, K3, seed=5).vertex_lists(),
        )


class AlmostPerfectTestCase(SimpleTestCase):
    """Tests para la cobertura casi perfecta"""

    def test_examples(self):
        """Test: K6 con eps=0.1 sí, vacío de 9 vértices no"""
        self.assertTrue(almost_perfect_coverage(complete(6), K3, "0.1"))
        self.assertFalse(almost_perfect_coverage(empty(9), K3, "0.1"))

    def test_eps_range(self):
        """Test: eps fuera de (0, 1)"""
        with self.assertRaises(LabError):
            almost_perfect_coverage(complete(6), K3, 0)
        with self.assertRaises(LabError):
            almost_perfect_coverage(complete(6), K3, 1)

    @tag("slow")
    def test_dense_gnp_covers_most_vertices(self):
        """Test: G(60, 8·60^{-2/3}) cubre ≥ 0.9·60 en al menos 40 de 50 semillas"""
        p = min(1.0, 8 * 60 ** (-2 / 3))
        root = Seed(31)
        hits = sum(almost_perfect_coverage(sample_gnp(60, p, root.derive(i)), K3, "0.1", seed=i) for i in range(50))
        self.assertGreaterEqual(hits, 40)


class TileApiTestCase(APITestCase):
    """Tests para el endpoint de tiling"""

    def test_tile_perfect(self):
        """Test: K6 con triángulos por la API"""
        response = self.client.post(
            "/api/tilings/tile/", {"host": serialize_graph6(complete(6)), "pattern": "k3"}, format="json"
        )
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["status"], "found")
        self.assertEqual(response.data["size"], 2)

    def test_tile_bad_pattern(self):
        """Test: patrón desconocido devuelve 400"""
        response = self.client.post("/api/tilings/tile/", {"host": "3\n0 1\n", "pattern": "zz"}, format="json")
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn("error", response.data)


class TileCommandTestCase(SimpleTestCase):
    """Tests para el comando tile"""

    def test_modes(self):
        """Test: los tres modos producen JSON con status, size, tiling y nodes_explored"""
        with tempfile.TemporaryDirectory() as tmp:
            host = write_graph(complete(6), Path(tmp) / "k6.txt")
            for mode, expected in [("perfect", "found"), ("max", "exact"), ("greedy", "greedy")]:
                out = StringIO()
                call_command("tile", "--host", str(host), "--pattern", "k3", "--mode", mode, stdout=out)
                report = json.loads(out.getvalue())
                self.assertEqual(report["status"], expected)
                self.assertEqual(report["size"], 2)
                self.assertIn("nodes_explored", report)

    def test_missing_host(self):
        """Test: archivo inexistente produce CommandError"""
        with self.assertRaises(CommandError):
            call_command("tile", "--host", "/no/existe.txt", stdout=StringIO())
