"""
Dicotomía de Hall para pares con |A| = |B|: o un emparejamiento perfecto o
un conjunto W con |N(W)| < |W|.

El emparejamiento máximo sale de Hopcroft–Karp; si no es perfecto, el
recubrimiento de vértices de König C da el violador W = A ∖ C (N(W) ⊆ C ∩ B
y |C| < |A|). Ambos resultados se validan antes de devolverlos.
"""

import logging
from dataclasses import dataclass

import networkx as nx
from networkx.algorithms import bipartite

from graphs.exceptions import LabError
from graphs.structures import Graph, vertex_set

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HallResult:
    matching: dict[int, int] | None = None
    violator: frozenset | None = None
    side: str | None = None

    @property
    def perfect(self) -> bool:
        return self.matching is not None

    def as_dict(self) -> dict:
        if self.perfect:
            return {"perfect": True, "matching": [[a, b] for a, b in sorted(self.matching.items())]}
        return {"perfect": False, "violator": sorted(self.violator), "side": self.side}


def neighbourhood(host: Graph, w, other) -> frozenset:
    other = frozenset(other)
    return frozenset(x for v in w for x in host.neighbors(v) if x in other)


def matching_problems(host: Graph, a, b, matching: dict[int, int]) -> list[str]:
    problems = []
    if set(matching) != set(a):
        problems.append("el emparejamiento no cubre A")
    if sorted(matching.values()) != sorted(b):
        problems.append("el emparejamiento no cubre B de forma inyectiva")
    problems.extend(f"{u}-{v} no es arista" for u, v in matching.items() if not host.has_edge(u, v))
    return problems


def is_hall_violator(host: Graph, w, other) -> bool:
    w = frozenset(w)
    return bool(w) and len(neighbourhood(host, w, other)) < len(w)


def hall_perfect_matching(host: Graph, a, b) -> HallResult:
    """Emparejamiento perfecto entre A y B o violador W ⊆ A de la condición de Hall."""
    side_a, side_b = vertex_set(host, a), vertex_set(host, b)
    if side_a & side_b:
        raise LabError("Los lados A y B deben ser disjuntos")
    if len(side_a) != len(side_b):
        raise LabError(f"hall_perfect_matching necesita |A| = |B| (recibido {len(side_a)} y {len(side_b)})")

    k = nx.Graph()
    k.add_nodes_from(side_a, bipartite=0)
    k.add_nodes_from(side_b, bipartite=1)
    k.add_edges_from((u, v) for u in side_a for v in host.neighbors(u) if v in side_b)
    maximum = bipartite.hopcroft_karp_matching(k, top_nodes=side_a)

    if len(maximum) == 2 * len(side_a):
        matching = {u: maximum[u] for u in sorted(side_a)}
        problems = matching_problems(host, side_a, side_b, matching)
        if problems:
            raise LabError(f"Emparejamiento inválido: {problems[0]}")
        return HallResult(matching=matching)

    cover = bipartite.to_vertex_cover(k, maximum, top_nodes=side_a)
    violator = frozenset(side_a - cover)
    if not is_hall_violator(host, violator, side_b):
        raise LabError("El violador de Hall no supera la verificación")
    logger.debug(f"Violador de Hall: |W|={len(violator)}, |N(W)|={len(neighbourhood(host, violator, side_b))}")
    return HallResult(violator=violator, side="A")
