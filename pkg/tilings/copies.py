"""
Copias (no necesariamente inducidas) de un patrón H en un grafo anfitrión.

Dos embeddings son la misma copia si tienen el mismo conjunto de vértices
imagen y el mismo conjunto de aristas imagen; de cada copia se guarda el
embedding con la tupla imagen lexicográficamente menor.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from networkx.algorithms.isomorphism import GraphMatcher

from densities.invariants import Pattern
from graphs.exceptions import LabError
from graphs.structures import Graph, induced, vertex_set
from graphs.utils import mask_of

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Embedding:
    pattern: Pattern = field(repr=False)
    image: tuple[int, ...]
    host: Graph | None = field(default=None, compare=False, repr=False)

    @cached_property
    def vertices(self) -> frozenset:
        return frozenset(self.image)

    @cached_property
    def edges(self) -> frozenset:
        image = self.image
        return frozenset(
            (min(image[x], image[y]), max(image[x], image[y])) for x, y in self.pattern.graph.edges
        )

    @property
    def key(self) -> tuple[frozenset, frozenset]:
        return self.vertices, self.edges

    @cached_property
    def mask(self) -> int:
        return mask_of(self.image)

    def with_host(self, host: Graph) -> "Embedding":
        return Embedding(self.pattern, self.image, host)

    def relabel(self, index_map, host: Graph) -> "Embedding":
        """Traduce la imagen con ``index_map`` (subgrafo inducido -> anfitrión)."""
        return Embedding(self.pattern, tuple(index_map[v] for v in self.image), host)


def copy_key(item) -> tuple[frozenset, frozenset]:
    """Clave (vértices, aristas) de un ``Embedding`` o de un par ya dado."""
    if isinstance(item, Embedding):
        return item.key
    vertices, edges = item
    return frozenset(vertices), frozenset((min(u, v), max(u, v)) for u, v in edges)


def _canonical_sort_key(embedding: Embedding):
    return tuple(sorted(embedding.vertices)), tuple(sorted(embedding.edges)), embedding.image


def _clique_images(g: Graph, k: int):
    """Cliques de tamaño k como tuplas crecientes, vía máscaras de vecinos."""
    masks = g.masks

    def extend(clique, candidates):
        if len(clique) == k:
            yield tuple(clique)
            return
        while candidates:
            low = candidates & -candidates
            v = low.bit_length() - 1
            candidates ^= low
            yield from extend(clique + [v], candidates & masks[v])

    for v in range(g.n):
        higher = masks[v] & ~((1 << (v + 1)) - 1)
        yield from extend([v], higher)


def _matcher_images(g: Graph, pattern: Pattern):
    matcher = GraphMatcher(g.to_networkx(), pattern.graph.to_networkx())
    for mapping in matcher.subgraph_monomorphisms_iter():
        image = [0] * pattern.order
        for host_vertex, pattern_vertex in mapping.items():
            image[pattern_vertex] = host_vertex
        yield tuple(image)


def _is_complete(pattern: Pattern) -> bool:
    return pattern.size == pattern.order * (pattern.order - 1) // 2


def enumerate_copies(
    g: Graph,
    h: Pattern,
    within: Iterable[int] | None = None,
    through: int | None = None,
) -> list[Embedding]:
    """
    Una representación por copia de ``h`` en ``g`` (opcionalmente dentro de
    ``within`` y pasando por ``through``), en orden canónico.
    """
    if through is not None:
        g.check_vertex(through)
    if within is not None:
        members = vertex_set(g, within)
        if through is not None and through not in members:
            raise LabError(f"El vértice {through} no pertenece al conjunto 'within'")
        sub, index_map = induced(g, members)
    else:
        sub, index_map = g, None

    images = _clique_images(sub, h.order) if _is_complete(h) else _matcher_images(sub, h)
    best: dict[tuple, Embedding] = {}
    for image in images:
        if index_map is not None:
            image = tuple(index_map[v] for v in image)
        if through is not None and through not in image:
            continue
        emb = Embedding(h, image, g)
        current = best.get(emb.key)
        if current is None or emb.image < current.image:
            best[emb.key] = emb

    copies = sorted(best.values(), key=_canonical_sort_key)
    logger.debug(f"{len(copies)} copias de {h} en {g!r}")
    return copies


class CopyIndex:
    """Copias de H en un anfitrión con sus máscaras y la lista de copias por vértice."""

    def __init__(self, host: Graph, pattern: Pattern, within: Iterable[int] | None = None):
        self.host = host
        self.pattern = pattern
        self.copies = enumerate_copies(host, pattern, within)
        self.masks = [c.mask for c in self.copies]
        self.by_vertex: dict[int, list[int]] = {v: [] for v in range(host.n)}
        for i, c in enumerate(self.copies):
            for v in c.image:
                self.by_vertex[v].append(i)

    def __len__(self):
        return len(self.copies)

    def live_through(self, v: int, blocked_mask: int) -> list[int]:
        return [i for i in self.by_vertex[v] if not self.masks[i] & blocked_mask]

    def any_inside(self, allowed_mask: int) -> int | None:
        """Índice de alguna copia contenida en ``allowed_mask``, o None."""
        for i, m in enumerate(self.masks):
            if m & ~allowed_mask == 0:
                return i
        return None
