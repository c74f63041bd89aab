"""
Tiling voraz con estrellas K_{1,t}.

El centro es el vértice descubierto con más vecinos descubiertos; las hojas,
sus vecinos descubiertos con menos vecinos descubiertos. Después una pasada
de aumento intenta sustituir cada estrella por dos dentro de sus vértices y
los que quedaron sin cubrir.
"""

import logging
from dataclasses import dataclass

from densities.invariants import Pattern, star_pattern
from graphs.exceptions import LabError
from graphs.structures import Graph
from graphs.utils import as_fraction, bits_of, format_fraction, mask_of, popcount
from tilings.certificates import Tiling, tiling_problems
from tilings.copies import Embedding

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StarTilingResult:
    pattern: Pattern
    stars: tuple[tuple[int, tuple[int, ...]], ...]
    uncovered: frozenset
    eps: object
    n: int

    @property
    def within_guarantee(self) -> bool:
        return len(self.uncovered) <= self.eps * self.n

    def tiling(self, host: Graph) -> Tiling:
        return Tiling.from_embeddings(Embedding(self.pattern, (c, *leaves), host) for c, leaves in self.stars)

    def as_dict(self) -> dict:
        return {
            "t": self.pattern.order - 1,
            "stars": [[c, list(leaves)] for c, leaves in self.stars],
            "uncovered": len(self.uncovered),
            "uncovered_vertices": sorted(self.uncovered),
            "eps": format_fraction(self.eps),
            "within_guarantee": self.within_guarantee,
        }


def _greedy_stars(g: Graph, t: int, pool: int) -> list[tuple[int, tuple[int, ...]]]:
    """Estrellas disjuntas dentro de la máscara ``pool``."""
    masks = g.masks
    stars = []
    while True:
        best, best_degree = None, t - 1
        for v in bits_of(pool):
            residual = popcount(masks[v] & pool)
            if residual > best_degree:
                best, best_degree = v, residual
        if best is None:
            return stars
        candidates = sorted(bits_of(masks[best] & pool), key=lambda u: (popcount(masks[u] & pool), u))
        leaves = tuple(sorted(candidates[:t]))
        stars.append((best, leaves))
        pool &= ~mask_of((best, *leaves))


def greedy_star_tiling(g: Graph, t: int, eps=None) -> StarTilingResult:
    if t < 1:
        raise LabError("t debe ser al menos 1")
    eps = as_fraction(eps if eps is not None else "0.1")
    pattern = star_pattern(t)
    everything = (1 << g.n) - 1
    stars = _greedy_stars(g, t, everything)

    improved = 0
    for s in list(stars):
        covered = 0
        for c, leaves in stars:
            covered |= mask_of((c, *leaves))
        pool = (everything & ~covered) | mask_of((s[0], *s[1]))
        replacement = _greedy_stars(g, t, pool)
        if len(replacement) >= 2:
            stars.remove(s)
            stars.extend(replacement)
            improved += 1

    result_stars = tuple(sorted(stars))
    covered = frozenset(v for c, leaves in result_stars for v in (c, *leaves))
    result = StarTilingResult(pattern, result_stars, frozenset(range(g.n)) - covered, eps, g.n)
    problems = tiling_problems(result.tiling(g), g, pattern)
    if problems:
        raise LabError(f"Tiling de estrellas inválido: {problems[0]}")
    logger.debug(
        f"Estrellas K_1,{t}: {len(result_stars)} ({improved} aumentos), {len(result.uncovered)} sin cubrir de {g.n}"
    )
    return result
