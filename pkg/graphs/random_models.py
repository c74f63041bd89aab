"""
Muestreadores con semilla para G(n,p), el modelo perturbado G ∪ G(n,p) y
las familias de grafos base (bipartito completo extremal y grafos de grado
mínimo lineal).

Reproducibilidad
----------------
Una ``Seed`` es una raíz de 64 bits más una ruta de claves. La sub-semilla
de una ruta se obtiene con ``numpy.random.SeedSequence(entropy=raíz,
spawn_key=ruta)``; las claves de texto se convierten a enteros con
BLAKE2b (8 bytes). El flujo de números es un Philox (contador), así que
la misma (raíz, ruta) produce siempre la misma muestra.

Cada par {u,v} con u < v recibe un uniforme propio, en el orden fijo de
``numpy.triu_indices(n, 1)``; la arista está presente si ese uniforme es
menor que p. Compartir los uniformes entre dos valores p1 ≤ p2 da el
acoplamiento monótono G1 ⊆ G2.
"""

import hashlib
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exceptions import RandomModelError
from .formats import read_graph
from .structures import Graph, complete, complete_bipartite, empty, min_degree, union
from .utils import as_fraction, format_fraction

logger = logging.getLogger(__name__)

SEED_MAX = 2**64 - 1


def _key_to_int(key) -> int:
    if isinstance(key, bool):
        key = int(key)
    if isinstance(key, int) and key >= 0:
        return key
    digest = hashlib.blake2b(repr(key).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


@dataclass(frozen=True)
class Seed:
    root: int
    path: tuple = ()

    def __post_init__(self):
        if not isinstance(self.root, int) or not (0 <= self.root <= SEED_MAX):
            raise RandomModelError(f"La semilla debe ser un entero de 64 bits sin signo (recibido {self.root!r})")

    def derive(self, *keys) -> "Seed":
        return Seed(self.root, self.path + tuple(_key_to_int(k) for k in keys))

    def sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(entropy=self.root, spawn_key=self.path)

    @property
    def value(self) -> int:
        return int(self.sequence().generate_state(1, np.uint64)[0])

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(self.sequence()))


def as_seed(seed) -> Seed:
    if isinstance(seed, Seed):
        return seed
    return Seed(int(seed))


def _check_probability(p) -> float:
    try:
        value = float(p)
    except (TypeError, ValueError):
        raise RandomModelError(f"Probabilidad inválida: {p!r}")
    if math.isnan(value) or value < 0 or value > 1:
        raise RandomModelError(f"La probabilidad debe estar en [0, 1] (recibido {p})")
    return value


# --- G(n,p) ---

def pair_uniforms(n: int, seed) -> np.ndarray:
    """Un uniforme en [0,1) por par u < v, en orden de ``triu_indices``."""
    if n < 0:
        raise RandomModelError("n debe ser no negativo")
    return as_seed(seed).generator().random(n * (n - 1) // 2)


def graph_from_uniforms(n: int, uniforms: np.ndarray, p) -> Graph:
    p = _check_probability(p)
    rows, cols = np.triu_indices(n, 1)
    present = uniforms < p
    return Graph(n, frozenset(zip(rows[present].tolist(), cols[present].tolist())))


def sample_gnp(n: int, p, seed) -> Graph:
    _check_probability(p)
    return graph_from_uniforms(n, pair_uniforms(n, seed), p)


def sample_gnp_coupled(n: int, ps, seed) -> list[Graph]:
    """Una muestra por cada p de ``ps`` con los mismos uniformes (p1 ≤ p2 ⇒ G1 ⊆ G2)."""
    uniforms = pair_uniforms(n, seed)
    return [graph_from_uniforms(n, uniforms, p) for p in ps]


def sample_bucketed(n: int, p, k: int, seed) -> list[Graph]:
    """
    k capas independientes G(n, p/k). Su unión se distribuye como G(n, p')
    con p' = 1 - (1 - p/k)^k ≤ p.
    """
    p = _check_probability(p)
    if k < 1:
        raise RandomModelError("El número de capas debe ser al menos 1")
    seed = as_seed(seed)
    return [sample_gnp(n, p / k, seed.derive("bucket", i)) for i in range(k)]


# --- Grafos base ---

@dataclass(frozen=True)
class ExtremalBase:
    graph: Graph
    x_class: frozenset
    y_class: frozenset
    a: Fraction
    b: Fraction
    pattern_order: int

    @property
    def eps(self) -> Fraction:
        """ε = b − a(|H|−1), la fracción que debe cubrir un tiling dentro de Y."""
        return self.b - self.a * (self.pattern_order - 1)


def _pattern_order(h) -> int:
    if isinstance(h, int):
        return h
    order = getattr(h, "order", None)
    if order is not None:
        return order
    return h.n


def make_extremal_base(n: int, a, h) -> ExtremalBase:
    """
    Bipartito completo con clases X (a·n vértices, etiquetas 0..a·n−1) e
    Y ((1−a)·n vértices). Exige 0 < a < 1, b = 1 − a > a(|H|−1) y a·n entero.
    """
    a = as_fraction(a)
    order = _pattern_order(h)
    if not (0 < a < 1):
        raise RandomModelError(f"a debe estar en (0, 1) (recibido {format_fraction(a)})")
    b = 1 - a
    if not b > a * (order - 1):
        raise RandomModelError(
            f"No se cumple la condición extremal b > a(|H|−1): "
            f"b={format_fraction(b)}, a(|H|−1)={format_fraction(a * (order - 1))}"
        )
    size_x = a * n
    if size_x.denominator != 1:
        raise RandomModelError(f"a·n = {format_fraction(size_x)} no es entero")
    size_x = int(size_x)
    graph = complete_bipartite(size_x, n - size_x)
    return ExtremalBase(graph, frozenset(range(size_x)), frozenset(range(size_x, n)), a, b, order)


def make_min_degree_base(n: int, alpha, seed) -> Graph:
    """
    Unión disjunta de k bipartitos completos balanceados que cubren [n], con
    k = max(1, min(⌊1/(2α)⌋, ⌊n / (2⌈αn⌉)⌋)). Las etiquetas se permutan con
    la semilla y se verifica δ ≥ ⌈αn⌉ antes de devolver. En un bloque de
    tamaño impar la parte grande recibe además un emparejamiento (y una
    arista más si su tamaño es impar), de modo que el bloque tiene
    δ = ⌈tamaño/2⌉.
    """
    alpha = as_fraction(alpha)
    if not (0 < alpha <= Fraction(1, 2)):
        raise RandomModelError(f"alpha debe estar en (0, 1/2] (recibido {format_fraction(alpha)})")
    need = math.ceil(alpha * n)
    if need > n - 1:
        raise RandomModelError(f"⌈αn⌉ = {need} supera n − 1 = {n - 1}")
    k = max(1, min(math.floor(1 / (2 * alpha)), n // (2 * need) if need else 1))
    sizes = [n // k + (1 if i < n % k else 0) for i in range(k)]
    permutation = as_seed(seed).generator().permutation(n).tolist()

    edges = set()
    start = 0
    for size in sizes:
        half = size // 2
        left = range(start, start + half)
        right = range(start + half, start + size)
        for u in left:
            for v in right:
                edges.add((permutation[u], permutation[v]))
        if size % 2 and size > 1:
            extra = list(right)
            for i in range(0, len(extra) - 1, 2):
                edges.add((permutation[extra[i]], permutation[extra[i + 1]]))
            if len(extra) % 2:
                edges.add((permutation[extra[-1]], permutation[extra[0]]))
        start += size
    graph = Graph(n, frozenset(edges))

    delta = min_degree(graph)
    if delta < need:
        raise RandomModelError(f"La base generada tiene δ = {delta} < ⌈αn⌉ = {need}")
    logger.debug(f"Base de grado mínimo: n={n}, alpha={format_fraction(alpha)}, {k} bloques, δ={delta}")
    return graph


# --- Descriptores de base y modelo perturbado ---

BASE_KINDS = ("empty", "complete", "extremal", "mindeg", "file", "explicit")


@dataclass(frozen=True)
class BaseDescriptor:
    kind: str
    value: Fraction | None = None
    path: str | None = None
    graph: Graph | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in BASE_KINDS:
            raise RandomModelError(f"Tipo de base desconocido: {self.kind}")
        if self.kind in ("extremal", "mindeg") and self.value is None:
            raise RandomModelError(f"La base '{self.kind}' necesita un parámetro racional")

    def __str__(self):
        if self.kind in ("extremal", "mindeg"):
            return f"{self.kind}:{format_fraction(self.value)}"
        if self.kind == "file":
            return f"file:{self.path}"
        return self.kind

    def build(self, n: int, seed, h=None) -> Graph:
        seed = as_seed(seed)
        if self.kind == "empty":
            return empty(n)
        if self.kind == "complete":
            return complete(n)
        if self.kind == "extremal":
            if h is None:
                raise RandomModelError("La base extremal necesita el patrón H")
            return make_extremal_base(n, self.value, h).graph
        if self.kind == "mindeg":
            return make_min_degree_base(n, self.value, seed)
        graph = self.graph if self.graph is not None else read_graph(self.path)
        if graph.n != n:
            raise RandomModelError(f"La base explícita tiene {graph.n} vértices y se pidió n={n}")
        return graph


def parse_base_descriptor(text: str) -> BaseDescriptor:
    text = (text or "empty").strip()
    kind, _, arg = text.partition(":")
    kind = kind.lower()
    if kind in ("empty", "complete"):
        return BaseDescriptor(kind)
    if kind in ("extremal", "mindeg"):
        return BaseDescriptor(kind, value=as_fraction(arg))
    if kind == "file":
        if not arg:
            raise RandomModelError("Falta la ruta en 'file:PATH'")
        return BaseDescriptor("file", path=arg)
    raise RandomModelError(f"Base desconocida '{text}' (usa empty|complete|extremal:a|mindeg:alpha|file:PATH)")


def explicit_base(graph: Graph) -> BaseDescriptor:
    return BaseDescriptor("explicit", graph=graph)


@dataclass(frozen=True)
class PerturbedSpec:
    base: BaseDescriptor
    p: float

    def __post_init__(self):
        object.__setattr__(self, "p", _check_probability(self.p))


def sample_perturbed(spec: PerturbedSpec, n: int, seed, h=None) -> tuple[Graph, Graph]:
    """
    Devuelve (base, base ∪ G(n,p)). La capa aleatoria usa la sub-semilla
    ``seed.derive("random")``, independiente de la base, de modo que bases
    distintas con la misma semilla comparten las aristas aleatorias.
    """
    seed = as_seed(seed)
    base = spec.base.build(n, seed.derive("base"), h)
    layer = sample_gnp(n, spec.p, seed.derive("random"))
    return base, union(base, layer)
