"""
Representación inmutable de grafos simples no dirigidos.

Los vértices son siempre 0..n-1. Las aristas se guardan como pares (u, v) con
u < v dentro de un ``frozenset``; la adyacencia y las máscaras de bits se
calculan una sola vez y se cachean en la instancia.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable

import networkx as nx

from .exceptions import GraphConstructionError, VertexOutOfRangeError
from .utils import mask_of, popcount

logger = logging.getLogger(__name__)

VertexSet = frozenset


def _normalize_edge(u, v, n) -> tuple[int, int]:
    if not (isinstance(u, int) and isinstance(v, int)):
        raise GraphConstructionError(f"Arista con extremos no enteros: ({u!r}, {v!r})")
    if u == v:
        raise GraphConstructionError(f"Lazo en el vértice {u}: los grafos son simples")
    for x in (u, v):
        if x < 0 or x >= n:
            raise GraphConstructionError(f"Vértice {x} fuera de rango [0, {n}) en la arista ({u}, {v})")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise GraphConstructionError(f"n debe ser un entero no negativo (recibido {self.n!r})")
        normalized = frozenset(_normalize_edge(u, v, self.n) for u, v in self.edges)
        object.__setattr__(self, "edges", normalized)

    # --- Estructuras derivadas (cacheadas) ---

    @cached_property
    def adjacency(self) -> tuple[frozenset, ...]:
        nbrs = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Máscara de vecinos de cada vértice."""
        return tuple(mask_of(s) for s in self.adjacency)

    @cached_property
    def sorted_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.edges))

    # --- Consultas ---

    def check_vertex(self, v: int) -> int:
        if not isinstance(v, int) or v < 0 or v >= self.n:
            raise VertexOutOfRangeError(v, self.n)
        return v

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        return (min(u, v), max(u, v)) in self.edges

    def neighbors(self, v: int) -> frozenset:
        return self.adjacency[self.check_vertex(v)]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.sorted_edges)
        return g

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> "Graph":
        """Reetiqueta los nodos de ``g`` en orden de ``sorted`` a 0..n-1."""
        nodes = sorted(g.nodes())
        index = {x: i for i, x in enumerate(nodes)}
        return cls(len(nodes), frozenset((index[u], index[v]) for u, v in g.edges() if u != v))

    def __repr__(self):
        return f"Graph(n={self.n}, e={self.edge_count})"


# --- Construcción ---

def from_edge_list(n: int, pairs: Iterable[tuple[int, int]]) -> Graph:
    return Graph(n, frozenset(tuple(p) for p in pairs))


def vertex_set(g: Graph, members: Iterable[int]) -> VertexSet:
    """Valida que ``members`` esté contenido en [0, g.n)."""
    out = frozenset(members)
    for v in out:
        g.check_vertex(v)
    return out


def union(g1: Graph, g2: Graph) -> Graph:
    if g1.n != g2.n:
        raise GraphConstructionError(f"No se pueden unir grafos con n distinto ({g1.n} vs {g2.n})")
    return Graph(g1.n, g1.edges | g2.edges)


def induced(g: Graph, s: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
    """
    Subgrafo inducido por ``s`` reetiquetado a 0..|s|-1 en orden creciente.
    Devuelve también el mapa nuevo -> viejo (``index_map[i]`` es el vértice original).
    """
    index_map = tuple(sorted(vertex_set(g, s)))
    position = {v: i for i, v in enumerate(index_map)}
    edges = frozenset(
        (position[u], position[v]) for u, v in g.edges if u in position and v in position
    )
    return Graph(len(index_map), edges), index_map


def degree(g: Graph, v: int) -> int:
    return g.degree(v)


def degree_into(g: Graph, v: int, s: Iterable[int]) -> int:
    target = mask_of(vertex_set(g, s))
    return popcount(g.masks[g.check_vertex(v)] & target)


def min_degree(g: Graph) -> int:
    if g.n == 0:
        return 0
    return min(len(nbrs) for nbrs in g.adjacency)


def edges_between(g: Graph, a: Iterable[int], b: Iterable[int]) -> int:
    """e(A, B) para conjuntos disjuntos."""
    b_mask = mask_of(b)
    return sum(popcount(g.masks[u] & b_mask) for u in a)


# --- Familias con nombre ---

def empty(n: int) -> Graph:
    return Graph(n)


def complete(n: int) -> Graph:
    return Graph(n, frozenset(combinations(range(n), 2)))


def complete_bipartite(a: int, b: int) -> Graph:
    """K_{a,b} con clases {0..a-1} y {a..a+b-1}."""
    return Graph(a + b, frozenset((u, a + v) for u in range(a) for v in range(b)))


def path(n: int) -> Graph:
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphConstructionError("Un ciclo necesita al menos 3 vértices")
    return Graph(n, frozenset((i, (i + 1) % n) for i in range(n)))


def star(t: int) -> Graph:
    """K_{1,t} con centro 0."""
    return Graph(t + 1, frozenset((0, i) for i in range(1, t + 1)))


def petersen() -> Graph:
    return Graph.from_networkx(nx.petersen_graph())


def disjoint_union(*graphs: Graph) -> Graph:
    edges = set()
    offset = 0
    for g in graphs:
        edges.update((u + offset, v + offset) for u, v in g.edges)
        offset += g.n
    return Graph(offset, frozenset(edges))


def relabel(g: Graph, permutation) -> Graph:
    """Aplica ``v -> permutation[v]``; ``permutation`` debe ser una permutación de 0..n-1."""
    if sorted(permutation) != list(range(g.n)):
        raise GraphConstructionError("El reetiquetado no es una permutación de los vértices")
    return Graph(g.n, frozenset((permutation[u], permutation[v]) for u, v in g.edges))
