import tempfile
from io import StringIO
from math import comb, sqrt
from pathlib import Path

import networkx as nx
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase, tag
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from rest_framework import status
from rest_framework.test import APITestCase

from .exceptions import GraphConstructionError, GraphParseError, RandomModelError, VertexOutOfRangeError
from .formats import (
    parse_edge_list,
    parse_graph,
    parse_graph6,
    read_graph,
    serialize_edge_list,
    serialize_graph6,
    write_graph,
)
from .models import GraphRecord
from .random_models import (
    BaseDescriptor,
    PerturbedSpec,
    Seed,
    explicit_base,
    make_extremal_base,
    make_min_degree_base,
    parse_base_descriptor,
    sample_bucketed,
    sample_gnp,
    sample_gnp_coupled,
    sample_perturbed,
)
from .structures import (
    Graph,
    complete,
    complete_bipartite,
    cycle,
    degree_into,
    empty,
    from_edge_list,
    induced,
    min_degree,
    path,
    petersen,
    star,
    union,
)

PROPERTY_SETTINGS = settings(
    max_examples=120,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)


@st.composite
def small_graphs(draw, max_n=9):
    n = draw(st.integers(min_value=0, max_value=max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph(n, frozenset(chosen))


def reference_graph6(g: Graph) -> str:
    """Codificador graph6 independiente (n < 63)."""
    bits = [1 if g.has_edge(i, j) else 0 for j in range(1, g.n) for i in range(j)]
    while len(bits) % 6:
        bits.append(0)
    out = [chr(g.n + 63)]
    for k in range(0, len(bits), 6):
        value = 0
        for b in bits[k:k + 6]:
            value = (value << 1) | b
        out.append(chr(value + 63))
    return "".join(out)


class GraphConstructionTestCase(SimpleTestCase):
    """Tests para la construcción y operaciones de grafos"""

    def test_from_edge_list_triangle(self):
        """Test: (3, [(0,1),(1,2),(0,2)]) es K3"""
        g = from_edge_list(3, [(0, 1), (1, 2), (0, 2)])
        self.assertEqual(g, complete(3))
        self.assertEqual(g.edge_count, 3)

    def test_from_edge_list_empty_and_dedup(self):
        """Test: grafo vacío y deduplicación de aristas simétricas"""
        self.assertEqual(from_edge_list(2, []).edge_count, 0)
        self.assertEqual(from_edge_list(4, [(0, 1), (1, 0)]).edge_count, 1)

    def test_construction_errors(self):
        """Test: lazos y vértices fuera de rango se rechazan"""
        with self.assertRaises(GraphConstructionError):
            from_edge_list(3, [(1, 1)])
        with self.assertRaises(GraphConstructionError):
            from_edge_list(3, [(0, 3)])
        with self.assertRaises(GraphConstructionError):
            from_edge_list(3, [(-1, 2)])

    def test_union(self):
        """Test: unión de camino y cuerda da K3; identidad e idempotencia"""
        self.assertEqual(union(path(3), from_edge_list(3, [(0, 2)])), complete(3))
        g = cycle(5)
        self.assertEqual(union(g, empty(5)), g)
        self.assertEqual(union(g, g), g)
        with self.assertRaises(GraphConstructionError):
            union(complete(3), complete(4))

    def test_induced(self):
        """Test: subgrafos inducidos reetiquetados"""
        sub, index_map = induced(complete(4), {0, 1, 2})
        self.assertEqual(sub, complete(3))
        self.assertEqual(index_map, (0, 1, 2))
        self.assertEqual(induced(cycle(5), set())[0], empty(0))
        sub, _ = induced(cycle(5), {0, 1, 2})
        self.assertEqual(sub, path(3))
        sub, index_map = induced(cycle(5), {4, 2, 3})
        self.assertEqual(index_map, (2, 3, 4))
        self.assertEqual(sub.edge_count, 2)
        with self.assertRaises(VertexOutOfRangeError):
            induced(cycle(5), {7})

    def test_degrees(self):
        """Test: grados, grado mínimo y grado hacia un conjunto"""
        self.assertEqual(min_degree(cycle(5)), 2)
        self.assertEqual(degree_into(complete(4), 0, {1, 2}), 2)
        self.assertEqual(min_degree(star(3)), 1)
        self.assertEqual(min_degree(empty(0)), 0)
        with self.assertRaises(VertexOutOfRangeError):
            complete(3).degree(3)

    def test_named_families(self):
        """Test: Petersen, bipartitos completos y estrellas"""
        p = petersen()
        self.assertEqual((p.n, p.edge_count, min_degree(p)), (10, 15, 3))
        k = complete_bipartite(3, 9)
        self.assertEqual(k.edge_count, 27)
        self.assertFalse(k.has_edge(0, 1))

    @PROPERTY_SETTINGS
    @given(small_graphs(), small_graphs())
    def test_union_edge_count_bound(self, g1, g2):
        """Test: e(g1 ∪ g2) ≤ e(g1) + e(g2), con igualdad sii son disjuntos"""
        if g1.n != g2.n:
            g2 = Graph(g1.n, frozenset(e for e in g2.edges if max(e) < g1.n))
        u = union(g1, g2)
        self.assertLessEqual(u.edge_count, g1.edge_count + g2.edge_count)
        disjoint = not (g1.edges & g2.edges)
        self.assertEqual(u.edge_count == g1.edge_count + g2.edge_count, disjoint)

    @PROPERTY_SETTINGS
    @given(small_graphs())
    def test_degree_sum_and_full_induced(self, g):
        """Test: suma de grados = 2e y G[V] = G"""
        self.assertEqual(sum(g.degree(v) for v in range(g.n)), 2 * g.edge_count)
        sub, index_map = induced(g, range(g.n))
        self.assertEqual(sub, g)
        self.assertEqual(index_map, tuple(range(g.n)))


class GraphFormatsTestCase(SimpleTestCase):
    """Tests para los formatos de lista de aristas y graph6"""

    def test_parse_edge_list(self):
        """Test: lectura de K3 con comentarios y líneas vacías"""
        self.assertEqual(parse_edge_list("3\n0 1\n1 2\n0 2\n"), complete(3))
        text = "# triángulo\n3\n\n0 1 # primera\n1 2\n2 0\n"
        self.assertEqual(parse_edge_list(text), complete(3))

    def test_parse_edge_list_errors_report_line(self):
        """Test: los errores indican la línea"""
        with self.assertRaises(GraphParseError) as ctx:
            parse_edge_list("3\n0 1\n1 x\n")
        self.assertEqual(ctx.exception.line, 3)
        with self.assertRaises(GraphParseError) as ctx:
            parse_edge_list("3\n0 1\n0 5\n")
        self.assertEqual(ctx.exception.line, 3)
        with self.assertRaises(GraphParseError) as ctx:
            parse_edge_list("3 4\n")
        self.assertEqual(ctx.exception.line, 1)
        with self.assertRaises(GraphParseError):
            parse_edge_list("")

    def test_parse_edge_list_rejects_unicode_digits(self):
        """Test: dígitos no ASCII en la línea de n son un error de formato con línea"""
        for header in ("²", "٣", "3²"):
            with self.assertRaises(GraphParseError) as ctx:
                parse_edge_list(f"# cabecera\n{header}\n")
            self.assertEqual(ctx.exception.line, 2)

    def test_graph6_matches_reference_encoder(self):
        """Test: graph6 coincide con un codificador independiente en el atlas y en grafos de 8 vértices"""
        corpus = [Graph.from_networkx(g) for g in nx.graph_atlas_g()[1:300]]
        corpus += [sample_gnp(8, 0.5, Seed(s)) for s in range(40)]
        for g in corpus:
            encoded = reference_graph6(g)
            self.assertEqual(serialize_graph6(g), encoded)
            self.assertEqual(parse_graph6(encoded), g)

    def test_graph6_header_and_bad_byte(self):
        """Test: cabecera opcional y byte inválido con offset"""
        k4 = complete(4)
        self.assertEqual(parse_graph6(">>graph6<<" + serialize_graph6(k4)), k4)
        with self.assertRaises(GraphParseError) as ctx:
            parse_graph6("C\x01~")
        self.assertEqual(ctx.exception.offset, 1)

    def test_round_trip_seeded_graphs(self):
        """Test: parse(serialize(g)) == g en 100 grafos aleatorios"""
        for s in range(100):
            g = sample_gnp(12, 0.3, Seed(s))
            self.assertEqual(parse_edge_list(serialize_edge_list(g)), g)
            self.assertEqual(parse_graph6(serialize_graph6(g)), g)

    def test_autodetect_and_files(self):
        """Test: detección automática y lectura/escritura de archivos"""
        g = cycle(6)
        self.assertEqual(parse_graph(serialize_graph6(g)), g)
        self.assertEqual(parse_graph("5\n"), empty(5))
        with tempfile.TemporaryDirectory() as tmp:
            write_graph(g, Path(tmp) / "c6.g6")
            write_graph(g, Path(tmp) / "c6.txt")
            self.assertEqual(read_graph(Path(tmp) / "c6.g6"), g)
            self.assertEqual(read_graph(Path(tmp) / "c6.txt"), g)


class RandomModelsTestCase(SimpleTestCase):
    """Tests para los muestreadores con semilla"""

    def test_gnp_extremes(self):
        """Test: p=0 da el grafo vacío y p=1 el completo"""
        self.assertEqual(sample_gnp(20, 0, Seed(1)), empty(20))
        self.assertEqual(sample_gnp(20, 1, Seed(1)), complete(20))
        with self.assertRaises(RandomModelError):
            sample_gnp(5, 1.5, Seed(1))

    def test_determinism_and_derivation(self):
        """Test: misma semilla, misma muestra; rutas distintas, muestras distintas"""
        self.assertEqual(sample_gnp(30, 0.3, Seed(7)), sample_gnp(30, 0.3, Seed(7)))
        root = Seed(7)
        self.assertEqual(root.derive(3, "x").value, Seed(7).derive(3, "x").value)
        self.assertNotEqual(root.derive(1).value, root.derive(2).value)
        self.assertNotEqual(sample_gnp(30, 0.3, root.derive(1)), sample_gnp(30, 0.3, root.derive(2)))
        with self.assertRaises(RandomModelError):
            Seed(-1)

    def test_monotone_coupling(self):
        """Test: acoplamiento monótono G1 ⊆ G2 para p1 ≤ p2"""
        graphs = sample_gnp_coupled(25, [0.1, 0.2, 0.5, 0.9], Seed(11))
        for smaller, larger in zip(graphs, graphs[1:]):
            self.assertTrue(smaller.edges <= larger.edges)

    def test_edge_count_concentration_quick(self):
        """Test: e(G(200, 1/2)) dentro de 4 desviaciones estándar"""
        mean = comb(200, 2) / 2
        sd = sqrt(comb(200, 2) / 4)
        for s in range(10):
            self.assertLess(abs(sample_gnp(200, 0.5, Seed(s)).edge_count - mean), 4 * sd)

    @tag("slow")
    def test_edge_count_concentration(self):
        """Test: n=1000, p=1/2, 100 semillas dentro de 4 desviaciones estándar"""
        mean = comb(1000, 2) / 2
        sd = sqrt(comb(1000, 2) / 4)
        for s in range(100):
            self.assertLess(abs(sample_gnp(1000, 0.5, Seed(s)).edge_count - mean), 4 * sd)

    def test_bucketed_layers(self):
        """Test: las capas son independientes y cada una tiene densidad p/k"""
        layers = sample_bucketed(100, 0.4, 4, Seed(3))
        self.assertEqual(len(layers), 4)
        self.assertNotEqual(layers[0], layers[1])
        for layer in layers:
            self.assertLess(abs(layer.edge_count - 0.1 * comb(100, 2)), 4 * sqrt(0.09 * comb(100, 2)))

    def test_extremal_base(self):
        """Test: a=1/4, n=12, H=K3 da K_{3,9}; bordes de la condición b > a(|H|−1)"""
        base = make_extremal_base(12, "1/4", 3)
        self.assertEqual(base.graph, complete_bipartite(3, 9))
        self.assertEqual((len(base.x_class), len(base.y_class)), (3, 9))
        self.assertEqual(str(base.eps), "1/4")
        with self.assertRaises(RandomModelError):
            make_extremal_base(12, "1/3", 3)
        with self.assertRaises(RandomModelError):
            make_extremal_base(10, "1/2", 2)
        with self.assertRaises(RandomModelError):
            make_extremal_base(10, "1/4", 3)  # a·n no entero

    def test_min_degree_base(self):
        """Test: bloques bipartitos con δ ≥ ⌈αn⌉"""
        g = make_min_degree_base(20, "1/2", Seed(1))
        self.assertEqual(min_degree(g), 10)
        self.assertEqual(g.edge_count, 100)
        g = make_min_degree_base(24, "1/4", Seed(2))
        self.assertEqual(min_degree(g), 6)
        self.assertEqual(g.edge_count, 72)
        self.assertEqual(nx.number_connected_components(g.to_networkx()), 2)
        for s in range(50):
            self.assertGreaterEqual(min_degree(make_min_degree_base(30, "1/5", Seed(s))), 6)
        with self.assertRaises(RandomModelError):
            make_min_degree_base(20, "3/4", Seed(1))

    def test_min_degree_base_odd_n(self):
        """Test: n impar con α = 1/2 alcanza δ ≥ ⌈n/2⌉"""
        g = make_min_degree_base(3, "1/2", Seed(0))
        self.assertEqual(g, complete(3))
        for n in (5, 7, 11, 21):
            g = make_min_degree_base(n, "1/2", Seed(n))
            self.assertGreaterEqual(min_degree(g), (n + 1) // 2)
        self.assertGreaterEqual(min_degree(make_min_degree_base(15, "1/5", Seed(3))), 3)

    def test_perturbed_model(self):
        """Test: base ⊆ perturbado, p=0 devuelve la base, base vacía es G(n,p)"""
        spec = PerturbedSpec(parse_base_descriptor("extremal:1/4"), 0)
        base, perturbed = sample_perturbed(spec, 12, Seed(5), 3)
        self.assertEqual(base, perturbed)
        self.assertEqual(base, complete_bipartite(3, 9))

        spec = PerturbedSpec(parse_base_descriptor("mindeg:1/4"), 0.2)
        base, perturbed = sample_perturbed(spec, 24, Seed(5))
        self.assertTrue(base.edges <= perturbed.edges)

        spec = PerturbedSpec(BaseDescriptor("empty"), 0.3)
        for s in range(20):
            _, perturbed = sample_perturbed(spec, 30, Seed(s))
            self.assertEqual(perturbed, sample_gnp(30, 0.3, Seed(s).derive("random")))

    def test_base_descriptor_parsing(self):
        """Test: descriptores de base válidos e inválidos"""
        self.assertEqual(str(parse_base_descriptor("extremal:0.25")), "extremal:1/4")
        self.assertEqual(parse_base_descriptor("complete").build(5, Seed(0)), complete(5))
        with self.assertRaises(RandomModelError):
            parse_base_descriptor("weird:1")
        with self.assertRaises(RandomModelError):
            PerturbedSpec(BaseDescriptor("empty"), -0.1)

    def test_explicit_base(self):
        """Test: base explícita en memoria y comprobación de n"""
        descriptor = explicit_base(cycle(5))
        self.assertEqual(descriptor.build(5, Seed(0)), cycle(5))
        self.assertEqual(str(descriptor), "explicit")
        with self.assertRaises(RandomModelError):
            descriptor.build(6, Seed(0))


class GraphRecordTestCase(TestCase):
    """Tests para el modelo GraphRecord"""

    def test_record_round_trip(self):
        """Test: to_graph reconstruye el grafo guardado"""
        g = petersen()
        record = GraphRecord.from_graph(g, name="petersen")
        record.save()
        stored = GraphRecord.objects.get(pk=record.pk)
        self.assertEqual(stored.to_graph(), g)
        self.assertEqual(stored.edge_count, 15)
        self.assertEqual(str(stored), "petersen")


class GraphApiTestCase(APITestCase):
    """Tests para los endpoints de grafos"""

    def test_upload_graph_text(self):
        """Test: subir un grafo como lista de aristas"""
        response = self.client.post("/api/graphs/", {"name": "k3", "text": "3\n0 1\n1 2\n0 2\n"}, format="json")
        self.assertEqual(response.status_code, status.HTTP_201_CREATED)
        self.assertEqual(response.data["n"], 3)
        self.assertEqual(response.data["edge_count"], 3)

    def test_upload_invalid_graph(self):
        """Test: un grafo mal formado devuelve 400"""
        response = self.client.post("/api/graphs/", {"text": "3\n0 9\n"}, format="json")
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_sample_endpoint(self):
        """Test: el endpoint sample guarda un grafo perturbado reproducible"""
        payload = {"n": 12, "p": 0.0, "seed": 4, "base": "extremal:1/4", "pattern": "k3"}
        response = self.client.post("/api/graphs/sample/", payload, format="json")
        self.assertEqual(response.status_code, status.HTTP_201_CREATED)
        self.assertEqual(response.data["edge_count"], 27)
        self.assertEqual(response.data["source"], "EXTREMAL")

    def test_sample_endpoint_rejects_extremal_violation(self):
        """Test: condición extremal violada devuelve 400 con mensaje"""
        payload = {"n": 12, "p": 0.1, "base": "extremal:1/3", "pattern": "k3"}
        response = self.client.post("/api/graphs/sample/", payload, format="json")
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn("error", response.data)


class SampleCommandTestCase(TestCase):
    """Tests para el comando sample"""

    def test_sample_command_edge_list(self):
        """Test: la salida es una lista de aristas parseable y determinista"""
        out1, out2 = StringIO(), StringIO()
        call_command("sample", "--n", "10", "--p", "0.4", "--seed", "9", stdout=out1)
        call_command("sample", "--n", "10", "--p", "0.4", "--seed", "9", stdout=out2)
        self.assertEqual(out1.getvalue(), out2.getvalue())
        self.assertEqual(parse_edge_list(out1.getvalue()).n, 10)

    def test_sample_command_graph6_and_save(self):
        """Test: formato graph6 y guardado opcional"""
        out = StringIO()
        call_command("sample", "--n", "8", "--base", "complete", "--format", "graph6", "--save", stdout=out, stderr=StringIO())
        self.assertEqual(parse_graph6(out.getvalue()), complete(8))
        self.assertEqual(GraphRecord.objects.count(), 1)

    def test_sample_command_error(self):
        """Test: errores de dominio se convierten en CommandError"""
        with self.assertRaises(CommandError):
            call_command("sample", "--n", "10", "--p", "2", stdout=StringIO())
