"""
Certificados de tiling y su validador independiente.

El validador no reutiliza máscaras ni índices de copias: vuelve a comprobar
cada arista del patrón con ``Graph.has_edge`` y la disjunción contando
apariciones de cada vértice.
"""

from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from densities.invariants import Pattern
from graphs.structures import Graph

from .copies import Embedding


@dataclass(frozen=True)
class Tiling:
    embeddings: tuple[Embedding, ...] = ()

    @classmethod
    def from_embeddings(cls, embeddings: Iterable[Embedding]) -> "Tiling":
        ordered = sorted(embeddings, key=lambda e: min(e.image))
        return cls(tuple(ordered))

    @property
    def covered(self) -> frozenset:
        return frozenset(v for e in self.embeddings for v in e.image)

    @property
    def size(self) -> int:
        return len(self.embeddings)

    @property
    def coverage(self) -> int:
        return sum(len(e.image) for e in self.embeddings)

    def vertex_lists(self) -> list[list[int]]:
        return [list(e.image) for e in self.embeddings]

    def with_host(self, host: Graph) -> "Tiling":
        return Tiling(tuple(e.with_host(host) for e in self.embeddings))

    def __add__(self, other: "Tiling") -> "Tiling":
        return Tiling.from_embeddings(self.embeddings + other.embeddings)


def tiling_problems(
    tiling: Tiling,
    host: Graph,
    pattern: Pattern,
    perfect: bool = False,
    cover: Iterable[int] | None = None,
) -> list[str]:
    """
    Lista de problemas del certificado (vacía si es válido). Con ``perfect``
    exige cubrir todo el anfitrión; con ``cover`` exige cubrir exactamente
    ese conjunto.
    """
    problems = []
    seen = Counter()
    h = pattern.graph
    for idx, emb in enumerate(tiling.embeddings):
        image = emb.image
        if len(image) != h.n:
            problems.append(f"copia {idx}: imagen de tamaño {len(image)}, se esperaba {h.n}")
            continue
        if len(set(image)) != len(image):
            problems.append(f"copia {idx}: la imagen no es inyectiva {image}")
        if any(not (0 <= v < host.n) for v in image):
            problems.append(f"copia {idx}: vértice fuera de rango {image}")
            continue
        for x, y in h.edges:
            if not host.has_edge(image[x], image[y]):
                problems.append(f"copia {idx}: falta la arista {image[x]}-{image[y]} en el anfitrión")
        seen.update(image)

    repeated = sorted(v for v, count in seen.items() if count > 1)
    if repeated:
        problems.append(f"copias no disjuntas en los vértices {repeated}")

    if cover is not None:
        target = frozenset(cover)
        if frozenset(seen) != target:
            missing = sorted(target - frozenset(seen))
            extra = sorted(frozenset(seen) - target)
            problems.append(f"cobertura incorrecta: faltan {missing}, sobran {extra}")
    elif perfect and len(seen) != host.n:
        problems.append(f"no es perfecto: cubre {len(seen)} de {host.n} vértices")
    return problems


def is_valid_tiling(tiling: Tiling, host: Graph, pattern: Pattern, perfect: bool = False, cover=None) -> bool:
    return not tiling_problems(tiling, host, pattern, perfect=perfect, cover=cover)
