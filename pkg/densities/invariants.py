"""
Invariantes de densidad exactos (racionales) de un patrón H y su clasificación.

d(H) = e(H)/(|H|−1). d*(H) es el máximo de d sobre subconjuntos de vértices
con al menos 2 elementos; basta con subgrafos inducidos porque, fijado el
conjunto de vértices, el inducido maximiza el número de aristas. Lo mismo
vale para d*(v,H) y para s_v (mínimo e(H[S]) entre los maximizadores que
contienen a v).

Todo se calcula enumerando los 2^|H| subconjuntos; |H| ≤ 20.
"""

import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations, permutations
from typing import NamedTuple

from django.db import models

from graphs.exceptions import DensityError
from graphs.formats import read_graph
from graphs.structures import Graph, complete, cycle, induced, path, star
from graphs.utils import as_fraction, format_fraction, mask_of

logger = logging.getLogger(__name__)

MAX_PATTERN_ORDER = 20
CANONICAL_ORDER_LIMIT = 7


class DensityCategory(models.TextChoices):
    STRICTLY_BALANCED = "StrictlyBalanced", "Strictly balanced"
    BALANCED_NOT_STRICTLY = "BalancedNotStrictly", "Balanced, not strictly"
    VERTEX_BALANCED_NOT_BALANCED = "VertexBalancedNotBalanced", "Vertex-balanced, not balanced"
    NON_VERTEX_BALANCED = "NonVertexBalanced", "Nonvertex-balanced"


class ThresholdFamily(models.TextChoices):
    JKV = "jkv", "n^{-1/d}(log n)^{1/e}"
    JKV_CONJECTURE = "jkv_conjecture", "conjetura JKV (vertex-balanced)"
    GERKE_MCDOWELL = "gerke_mcdowell", "n^{-1/d*}"


def _check_order(h: Graph):
    if h.n < 2:
        raise DensityError(f"El patrón necesita al menos 2 vértices (tiene {h.n})")
    if h.n > MAX_PATTERN_ORDER:
        raise DensityError(f"Patrón demasiado grande para enumerar subconjuntos ({h.n} > {MAX_PATTERN_ORDER})")


@lru_cache(maxsize=256)
def _induced_edge_counts(h: Graph) -> tuple[int, ...]:
    """e(H[S]) para cada máscara S."""
    counts = [0] * (1 << h.n)
    masks = h.masks
    for mask in range(1, 1 << h.n):
        low = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << low)
        counts[mask] = counts[rest] + (masks[low] & rest).bit_count()
    return tuple(counts)


def _subsets_by_size(n: int):
    """(tamaño, tupla ordenada, máscara) en orden de tamaño y luego lexicográfico."""
    for size in range(2, n + 1):
        for combo in combinations(range(n), size):
            yield size, combo, mask_of(combo)


def density(h: Graph) -> Fraction:
    _check_order(h)
    return Fraction(h.edge_count, h.n - 1)


def max_density(h: Graph) -> tuple[Fraction, frozenset]:
    """
    d*(H) y el subconjunto que lo alcanza; empates por menor tamaño y luego
    orden lexicográfico.
    """
    _check_order(h)
    counts = _induced_edge_counts(h)
    best, witness = None, None
    for size, combo, mask in _subsets_by_size(h.n):
        value = Fraction(counts[mask], size - 1)
        if best is None or value > best:
            best, witness = value, combo
    return best, frozenset(witness)


def vertex_max_density(h: Graph, v: int) -> Fraction:
    _check_order(h)
    h.check_vertex(v)
    counts = _induced_edge_counts(h)
    bit = 1 << v
    return max(
        Fraction(counts[mask], size - 1)
        for size, _, mask in _subsets_by_size(h.n)
        if mask & bit
    )


def s_value(h: Graph, v: int) -> int:
    target = vertex_max_density(h, v)
    counts = _induced_edge_counts(h)
    bit = 1 << v
    return min(
        counts[mask]
        for size, _, mask in _subsets_by_size(h.n)
        if mask & bit and Fraction(counts[mask], size - 1) == target
    )


@dataclass(frozen=True)
class DensityProfile:
    d: Fraction
    d_star: Fraction
    d_star_v: tuple[Fraction, ...]
    s_v: tuple[int, ...]
    s: int
    category: str
    witness_subset: frozenset
    strictly_balanced: bool

    @property
    def balanced(self) -> bool:
        return self.d_star == self.d

    @property
    def vertex_balanced(self) -> bool:
        return all(value == self.d_star for value in self.d_star_v)

    @property
    def s_in_conjecture_scope(self) -> bool:
        return self.vertex_balanced

    @property
    def applicable_threshold(self) -> str:
        if self.category == DensityCategory.STRICTLY_BALANCED:
            return ThresholdFamily.JKV.value
        if self.vertex_balanced:
            return ThresholdFamily.JKV_CONJECTURE.value
        return ThresholdFamily.GERKE_MCDOWELL.value

    def as_dict(self) -> dict:
        return {
            "d": format_fraction(self.d),
            "d_star": format_fraction(self.d_star),
            "d_star_v": {str(v): format_fraction(x) for v, x in enumerate(self.d_star_v)},
            "s_v": {str(v): x for v, x in enumerate(self.s_v)},
            "s": self.s,
            "category": str(self.category),
            "witness_subset": sorted(self.witness_subset),
            "balanced": self.balanced,
            "strictly_balanced": self.strictly_balanced,
            "vertex_balanced": self.vertex_balanced,
            "s_in_conjecture_scope": self.s_in_conjecture_scope,
            "applicable_threshold": self.applicable_threshold,
        }


def classify(h: Graph) -> DensityProfile:
    _check_order(h)
    counts = _induced_edge_counts(h)
    full = (1 << h.n) - 1
    d = Fraction(counts[full], h.n - 1)

    d_star, witness = None, None
    d_star_v = [None] * h.n
    s_v = [None] * h.n
    strictly = True
    for size, combo, mask in _subsets_by_size(h.n):
        value = Fraction(counts[mask], size - 1)
        if d_star is None or value > d_star:
            d_star, witness = value, combo
        if mask != full and value >= d:
            strictly = False
        for v in combo:
            if d_star_v[v] is None or value > d_star_v[v]:
                d_star_v[v], s_v[v] = value, counts[mask]
            elif value == d_star_v[v] and counts[mask] < s_v[v]:
                s_v[v] = counts[mask]

    if strictly:
        category = DensityCategory.STRICTLY_BALANCED
    elif d_star == d:
        category = DensityCategory.BALANCED_NOT_STRICTLY
    elif all(value == d_star for value in d_star_v):
        category = DensityCategory.VERTEX_BALANCED_NOT_BALANCED
    else:
        category = DensityCategory.NON_VERTEX_BALANCED

    profile = DensityProfile(
        d=d,
        d_star=d_star,
        d_star_v=tuple(d_star_v),
        s_v=tuple(s_v),
        s=max(s_v),
        category=category.value,
        witness_subset=frozenset(witness),
        strictly_balanced=strictly,
    )
    logger.debug(f"Clasificación de {h!r}: {profile.category}, d*={format_fraction(d_star)}")
    return profile


class ThresholdFormulas(NamedTuple):
    p_jkv: float
    p_gm: float
    p_perturbed: float


def _clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


def threshold_formulas(h: Graph, n: int, c) -> ThresholdFormulas:
    """
    p_jkv = n^{−1/d}(ln n)^{1/e(H)}, p_gm = n^{−1/d*} y p_perturbed = c·n^{−1/d*},
    cada una recortada a [0, 1].
    """
    _check_order(h)
    if h.edge_count == 0:
        raise DensityError("Las fórmulas de umbral requieren un patrón con al menos una arista")
    if n < 3:
        raise DensityError("Las fórmulas de umbral requieren n ≥ 3")
    c = as_fraction(c)
    if c < 0:
        raise DensityError("c debe ser no negativo")
    d = density(h)
    d_star, _ = max_density(h)
    p_jkv = n ** (-1 / float(d)) * math.log(n) ** (1 / h.edge_count)
    p_gm = n ** (-1 / float(d_star))
    return ThresholdFormulas(_clamp(p_jkv), _clamp(p_gm), _clamp(float(c) * p_gm))


def perturbed_probability(d_star: Fraction, n: int, c) -> float:
    """p = min(1, c·n^{−1/d*}) usada por los barridos."""
    return _clamp(float(as_fraction(c)) * n ** (-1 / float(d_star)))


# --- Patrones ---

def canonical_edges(h: Graph) -> tuple[tuple[int, int], ...]:
    """
    Lista de aristas mínima lexicográficamente entre todos los reetiquetados
    (hasta 7 vértices); por encima se usa la lista ordenada tal cual.
    """
    if h.n > CANONICAL_ORDER_LIMIT:
        return h.sorted_edges
    best = None
    for perm in permutations(range(h.n)):
        edges = tuple(sorted(tuple(sorted((perm[u], perm[v]))) for u, v in h.edges))
        if best is None or edges < best:
            best = edges
    return best


@dataclass(frozen=True)
class Pattern:
    graph: Graph
    profile: DensityProfile
    name: str = ""

    @classmethod
    def from_graph(cls, graph: Graph, name: str = "", require_edge: bool = True) -> "Pattern":
        if require_edge and graph.edge_count == 0:
            raise DensityError("Un patrón de tiling necesita al menos una arista")
        return cls(graph, classify(graph), name)

    @property
    def order(self) -> int:
        return self.graph.n

    @property
    def size(self) -> int:
        return self.graph.edge_count

    @cached_property
    def edge_list(self) -> tuple[tuple[int, int], ...]:
        return canonical_edges(self.graph)

    def minus_vertex(self, x: int) -> tuple[Graph, tuple[int, ...]]:
        """H' = H − x y el mapa de etiquetas de H' a las de H."""
        self.graph.check_vertex(x)
        return induced(self.graph, [v for v in range(self.order) if v != x])

    def default_removed_vertex(self) -> int:
        """Vértice de grado máximo, el de menor índice en caso de empate."""
        return max(range(self.order), key=lambda v: (self.graph.degree(v), -v))

    def __str__(self):
        return self.name or f"H(n={self.order}, e={self.size})"


def star_pattern(t: int, name: str = "") -> Pattern:
    """
    K_{1,t} sin enumerar subconjuntos, así que no tiene el tope de orden de
    ``classify``: d = d* = 1, cada arista alcanza d* y sólo K_{1,1} es
    estrictamente balanceado.
    """
    if t < 1:
        raise DensityError(f"La estrella necesita t ≥ 1 (recibido {t})")
    one = Fraction(1)
    strictly = t == 1
    category = DensityCategory.STRICTLY_BALANCED if strictly else DensityCategory.BALANCED_NOT_STRICTLY
    profile = DensityProfile(
        d=one,
        d_star=one,
        d_star_v=(one,) * (t + 1),
        s_v=(1,) * (t + 1),
        s=1,
        category=category.value,
        witness_subset=frozenset({0, 1}),
        strictly_balanced=strictly,
    )
    return Pattern(star(t), profile, name or f"K_{{1,{t}}}")


def triangle_with_pendant() -> Graph:
    return Graph(4, frozenset({(0, 1), (0, 2), (1, 2), (2, 3)}))


NAMED_PATTERNS = {
    "k2": lambda: complete(2),
    "k3": lambda: complete(3),
    "k4": lambda: complete(4),
    "k5": lambda: complete(5),
    "c4": lambda: cycle(4),
    "c5": lambda: cycle(5),
    "p3": lambda: path(3),
    "k13": lambda: star(3),
    "triangle_pendant": triangle_with_pendant,
}

_FAMILY = re.compile(r"^(k|c|p|star)(\d+)$")


def named_pattern(name: str) -> Pattern:
    key = name.strip().lower().replace("_{", "").replace("}", "").replace(",", "")
    if key in NAMED_PATTERNS:
        return Pattern.from_graph(NAMED_PATTERNS[key](), name=key)
    match = _FAMILY.match(key)
    if match:
        family, size = match.group(1), int(match.group(2))
        if family == "star":
            return star_pattern(size, name=key)
        builders = {"k": complete, "c": cycle, "p": path}
        return Pattern.from_graph(builders[family](size), name=key)
    raise DensityError(f"Patrón desconocido '{name}' (usa {', '.join(NAMED_PATTERNS)} o file:PATH)")


def parse_pattern(spec: str) -> Pattern:
    spec = spec.strip()
    if spec.lower().startswith("file:"):
        path_text = spec[5:]
        return Pattern.from_graph(read_graph(path_text), name=spec)
    return named_pattern(spec)
