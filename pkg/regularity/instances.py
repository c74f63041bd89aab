"""Instancias sintéticas con semilla para probar las herramientas de pares."""

import math
from dataclasses import dataclass

from graphs.exceptions import RandomModelError
from graphs.random_models import as_seed, make_min_degree_base, sample_bucketed, sample_gnp
from graphs.structures import Graph, min_degree, union
from graphs.utils import as_fraction, format_fraction

from .pairs import SuperRegularityReport, check_super_regular


@dataclass(frozen=True)
class PairInstance:
    cross: Graph
    random_layer: Graph
    side_s: frozenset
    side_t: frozenset
    super_regular: SuperRegularityReport | None = None


def random_bipartite_pair(size_a: int, size_b: int, p, seed) -> tuple[Graph, frozenset, frozenset]:
    """A = 0..size_a−1, B = size_a..; cada arista cruzada con probabilidad p."""
    p = float(p)
    if not (0 <= p <= 1):
        raise RandomModelError(f"La probabilidad debe estar en [0, 1] (recibido {p})")
    present = as_seed(seed).generator().random((size_a, size_b)) < p
    edges = frozenset((i, size_a + j) for i in range(size_a) for j in range(size_b) if present[i, j])
    return Graph(size_a + size_b, edges), frozenset(range(size_a)), frozenset(range(size_a, size_a + size_b))


def split_pair(k: int) -> tuple[Graph, frozenset, frozenset, frozenset, frozenset]:
    """
    Par con A = A₁ ∪ A₂, B = B₁ ∪ B₂ (k vértices cada parte) y aristas
    completas A₁–B₁ y A₂–B₂. Devuelve (grafo, A, B, A₁, B₂).
    """
    a1, a2 = range(0, k), range(k, 2 * k)
    b1, b2 = range(2 * k, 3 * k), range(3 * k, 4 * k)
    edges = {(u, v) for u in a1 for v in b1} | {(u, v) for u in a2 for v in b2}
    return Graph(4 * k, frozenset(edges)), frozenset(range(2 * k)), frozenset(range(2 * k, 4 * k)), frozenset(a1), frozenset(b2)


def super_regular_pair(size_a: int, size_b: int, p, eps, d, seed) -> tuple[Graph, frozenset, frozenset]:
    """
    Par (ε,d)-super-regular con semilla: bipartito completo menos las
    no-aristas de una muestra de probabilidad ``p``, con a lo sumo Δ
    no-aristas por vértice. Todo X × Y admisible pierde como mucho
    Δ·mín(|X|,|Y|) aristas, así que Δ < (1−d)·k basta, con k el mayor
    tamaño mínimo admisible.
    """
    eps, d = as_fraction(eps), as_fraction(d)
    if not (0 < eps <= 1) or not (0 <= d < 1):
        raise RandomModelError(f"Parámetros inválidos eps={format_fraction(eps)}, d={format_fraction(d)}")
    k = max(1, math.ceil(eps * size_a), math.ceil(eps * size_b))
    cap = math.ceil((1 - d) * min(k, size_a, size_b)) - 1
    rng = as_seed(seed).generator()
    missing = list(zip(*(axis.tolist() for axis in (rng.random((size_a, size_b)) >= float(p)).nonzero())))
    load_a, load_b = [0] * size_a, [0] * size_b
    removed = set()
    for idx in rng.permutation(len(missing)).tolist():
        i, j = missing[idx]
        if load_a[i] < cap and load_b[j] < cap:
            removed.add((i, j))
            load_a[i] += 1
            load_b[j] += 1
    edges = frozenset(
        (i, size_a + j) for i in range(size_a) for j in range(size_b) if (i, j) not in removed
    )
    return Graph(size_a + size_b, edges), frozenset(range(size_a)), frozenset(range(size_a, size_a + size_b))


def pair_completion_instance(
    size_s: int, size_t: int, cross_p, random_p, seed, buckets: int = 1, eps=None, d=None
) -> PairInstance:
    """
    S = 0..|S|−1, T = |S|..; capa cruzada bipartita con probabilidad
    ``cross_p`` y capa aleatoria igual a la última de ``buckets`` capas
    G(n, random_p) independientes. Con ``eps`` y ``d`` la capa cruzada es
    (ε,d)-super-regular y se comprueba con ``check_super_regular``.
    """
    if (eps is None) != (d is None):
        raise RandomModelError("eps y d se indican juntos")
    seed = as_seed(seed)
    report = None
    if eps is None:
        cross, side_s, side_t = random_bipartite_pair(size_s, size_t, cross_p, seed.derive("cross"))
    else:
        cross, side_s, side_t = super_regular_pair(size_s, size_t, cross_p, eps, d, seed.derive("cross"))
        report = check_super_regular(cross, side_s, side_t, eps, d, seed=seed.derive("check"))
        if not report.holds:
            raise RandomModelError(f"La capa cruzada no es super-regular: {report.as_dict()}")
    n = size_s + size_t
    if buckets == 1:
        layer = sample_gnp(n, random_p, seed.derive("random"))
    else:
        layer = sample_bucketed(n, float(random_p) * buckets, buckets, seed.derive("random"))[-1]
    return PairInstance(cross, layer, side_s, side_t, report)


def min_degree_host(n: int, t: int, margin: int, seed, sprinkle=None) -> Graph:
    """
    Grafo con δ ≥ n/(t+1) + margin: base de grado mínimo más una capa
    G(n, sprinkle) (por defecto 2/n).
    """
    seed = as_seed(seed)
    need = -(-n // (t + 1)) + margin
    if need > n // 2:
        raise RandomModelError(f"δ ≥ {need} no cabe en una base de grado mínimo con n={n}")
    base = make_min_degree_base(n, f"{need}/{n}", seed.derive("base"))
    layer = sample_gnp(n, sprinkle if sprinkle is not None else min(1.0, 2 / n), seed.derive("sprinkle"))
    host = union(base, layer)
    if min_degree(host) < need:
        raise RandomModelError(f"δ = {min_degree(host)} < {need}")
    return host
