"""
Completar un par super-regular (S, T) a un H-tiling perfecto de S ∪ T.

El anfitrión es G*: las aristas cruzadas S–T de la capa ``cross`` más las
aristas de la capa aleatoria dentro de S ∪ T. Sea x el vértice de grado
máximo de H y H' = H − x, con h = |H| − 1 vértices. Una S-copia es una
copia de H' en S (aristas aleatorias) más un vértice de T adyacente en G*
a todos sus vértices; una T-copia, lo simétrico.

Rutas:

- H = K2: emparejamiento M en la capa aleatoria dentro del lado grande
  para igualar tamaños y después Hall entre S y el resto.
- |H| ≥ 3 (por etapas): H'-tiling M de h-conjuntos excelentes en T,
  elección de (X, M') verificando Hall para cada X' ⊆ X, absorción de T₁,
  T₂ aleatorio, 𝒯₂ con a S-copias y b T-copias (voraz en proporción a:b
  con retroceso acotado), 𝒯₃,
  𝒯₄ y el emparejamiento final de X' con M'.

Si una etapa falla se recurre al solver exacto sobre G*[S ∪ T] y el
resultado queda marcado como "fallback".
"""

import heapq
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations

from django.db import models

from densities.invariants import Pattern
from graphs.exceptions import GraphConstructionError, LabError, PairCompletionError
from graphs.random_models import as_seed
from graphs.structures import Graph, induced, vertex_set
from graphs.utils import as_fraction, bits_of, format_fraction, lab_setting, mask_of, popcount
from tilings.certificates import Tiling, tiling_problems
from tilings.copies import Embedding, enumerate_copies
from tilings.solver import BudgetExhausted, ExactCover, TilingStatus, perfect_tiling

from .matching import hall_perfect_matching

logger = logging.getLogger(__name__)

DEFAULT_EPS5 = "0.2"
DEFAULT_PHI = "0.02"
DEFAULT_D1 = "0.1"
DEFAULT_RETRY_CAP = 25
DEFAULT_HSET_CAP = 50_000
DEFAULT_NODE_BUDGET = 200_000
BALANCED_BRANCHING = 3
BALANCED_NODES_PER_COPY = 100


class PairRoute(models.TextChoices):
    MATCHING = "matching", "Matching (H = K2)"
    STAGED = "staged", "Staged"
    FALLBACK = "fallback", "Exact fallback"


class StageFailure(Exception):
    pass


@dataclass(frozen=True)
class PairCompletionParams:
    eps5: Fraction
    phi: Fraction
    d1: Fraction
    retry_cap: int = DEFAULT_RETRY_CAP
    budget: int = DEFAULT_NODE_BUDGET

    def __post_init__(self):
        for name in ("eps5", "phi", "d1"):
            value = as_fraction(getattr(self, name))
            if not (0 < value < 1):
                raise PairCompletionError(f"{name} debe estar en (0, 1) (recibido {format_fraction(value)})")
            object.__setattr__(self, name, value)
        if self.retry_cap < 1 or self.budget < 1:
            raise PairCompletionError("retry_cap y budget deben ser positivos")

    @classmethod
    def from_settings(cls, **overrides) -> "PairCompletionParams":
        values = {
            "eps5": lab_setting("LAB_PAIR_EPS5", DEFAULT_EPS5),
            "phi": lab_setting("LAB_PAIR_PHI", DEFAULT_PHI),
            "d1": lab_setting("LAB_PAIR_D1", DEFAULT_D1),
            "retry_cap": lab_setting("LAB_PAIR_RETRY_CAP", DEFAULT_RETRY_CAP),
            "budget": lab_setting("LAB_NODE_BUDGET", DEFAULT_NODE_BUDGET),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def as_dict(self) -> dict:
        return {
            "eps5": format_fraction(self.eps5),
            "phi": format_fraction(self.phi),
            "d1": format_fraction(self.d1),
            "retry_cap": self.retry_cap,
            "budget": self.budget,
            "constants": "valores por defecto de escritorio, no los de la jerarquía asintótica",
        }


@dataclass(frozen=True)
class PairCompletionResult:
    status: str
    tiling: Tiling | None
    route: str
    stage_log: tuple[str, ...]
    parameters: dict

    @property
    def found(self) -> bool:
        return self.status == TilingStatus.FOUND

    def as_dict(self) -> dict:
        return {
            "status": str(self.status),
            "route": str(self.route),
            "size": self.tiling.size if self.tiling else 0,
            "tiling": self.tiling.vertex_lists() if self.tiling else None,
            "stage_log": list(self.stage_log),
            "parameters": self.parameters,
        }


@dataclass(frozen=True)
class HSetClass:
    members: frozenset
    good: bool
    excellent: bool
    common_nbhd_size: int


# --- Anfitrión y copias tipadas ---

def pair_host(cross: Graph, random_layer: Graph, s, t) -> Graph:
    """G*: aristas cruzadas S–T de ``cross`` y aristas de ``random_layer`` dentro de S ∪ T."""
    if cross.n != random_layer.n:
        raise GraphConstructionError(f"Las capas tienen n distinto ({cross.n} vs {random_layer.n})")
    s, t = vertex_set(cross, s), vertex_set(cross, t)
    both = s | t
    edges = {(u, v) for u, v in cross.edges if (u in s and v in t) or (u in t and v in s)}
    edges |= {(u, v) for u, v in random_layer.edges if u in both and v in both}
    return Graph(cross.n, frozenset(edges))


@dataclass(frozen=True)
class PatternSplit:
    pattern: Pattern
    removed: int
    hprime: Pattern
    index_map: tuple[int, ...]

    @classmethod
    def of(cls, pattern: Pattern) -> "PatternSplit":
        if pattern.order < 3:
            raise PairCompletionError("Las copias tipadas necesitan |H| ≥ 3")
        removed = pattern.default_removed_vertex()
        graph, index_map = pattern.minus_vertex(removed)
        hprime = Pattern.from_graph(graph, name=f"{pattern}-{removed}", require_edge=False)
        return cls(pattern, removed, hprime, index_map)

    @property
    def h(self) -> int:
        return self.hprime.order

    def assemble(self, hprime_image, apex: int, host: Graph) -> Embedding:
        image = [0] * self.pattern.order
        for i, v in enumerate(hprime_image):
            image[self.index_map[i]] = v
        image[self.removed] = apex
        return Embedding(self.pattern, tuple(image), host)


def _spans(layer: Graph, members, hprime: Graph) -> bool:
    if hprime.edge_count == 0:
        return True
    members = tuple(members)
    return any(all(layer.has_edge(perm[x], perm[y]) for x, y in hprime.edges) for perm in permutations(members))


def _hprime_images(layer: Graph, split: PatternSplit, within) -> list[tuple[int, ...]]:
    """Copias de H' en la capa aleatoria dentro de ``within`` (imágenes en etiquetas de H')."""
    within = sorted(within)
    if len(within) < split.h:
        return []
    if split.hprime.size == 0:
        return list(combinations(within, split.h))
    return [c.image for c in enumerate_copies(layer, split.hprime, within=within)]


def _common(masks, members, target: int) -> int:
    for v in members:
        target &= masks[v]
    return target


def _typed_copies(host: Graph, layer: Graph, split: PatternSplit, home, away) -> list[Embedding]:
    away_mask = mask_of(away)
    copies = {}
    for image in _hprime_images(layer, split, home):
        for apex in bits_of(_common(host.masks, image, away_mask)):
            emb = split.assemble(image, apex, host)
            copies.setdefault(emb.key, emb)
    return sorted(copies.values(), key=lambda e: (tuple(sorted(e.vertices)), tuple(sorted(e.edges))))


def enumerate_typed_copies(cross: Graph, random_layer: Graph, s, t, pattern: Pattern, side: str = "S") -> list[Embedding]:
    """
    S-copias (``side="S"``: H' en S y el vértice restante en T) o T-copias
    (``side="T"``) del par, sobre el anfitrión G*.
    """
    if side not in ("S", "T"):
        raise LabError("side debe ser 'S' o 'T'")
    host = pair_host(cross, random_layer, s, t)
    home, away = (s, t) if side == "S" else (t, s)
    return _typed_copies(host, random_layer, PatternSplit.of(pattern), frozenset(home), frozenset(away))


# --- h-conjuntos buenos y excelentes ---

def classify_h_sets(cross: Graph, random_layer: Graph, s, t, hprime, d1, cap: int | None = None, seed=0) -> list[HSetClass]:
    """
    Clasifica los h-subconjuntos de T (h = |H'|): bueno si su vecindad común
    cruzada en S tiene al menos d1·|S| vértices; excelente si además genera
    H' en la capa aleatoria. Por encima de ``cap`` se usa una familia
    muestreada.
    """
    d1 = as_fraction(d1)
    if not (0 < d1 < 1):
        raise LabError(f"d1 debe estar en (0, 1) (recibido {format_fraction(d1)})")
    graph = getattr(hprime, "graph", hprime)
    s, t = vertex_set(cross, s), vertex_set(cross, t)
    h = graph.n
    cap = cap if cap is not None else lab_setting("LAB_HSET_ENUMERATION_CAP", DEFAULT_HSET_CAP)
    members = sorted(t)

    if math.comb(len(members), h) <= cap:
        family = combinations(members, h)
    else:
        rng = as_seed(seed).generator()
        sampled = {tuple(sorted(rng.choice(members, size=h, replace=False).tolist())) for _ in range(cap)}
        family = sorted(sampled)
        logger.debug(f"classify_h_sets: familia muestreada de {len(family)} conjuntos")

    s_mask = mask_of(s)
    out = []
    for combo in family:
        common = popcount(_common(cross.masks, combo, s_mask))
        good = common >= d1 * len(s)
        out.append(HSetClass(frozenset(combo), good, good and _spans(random_layer, combo, graph), common))
    return out


# --- Ruta H = K2 ---

def _matching_route(host: Graph, layer: Graph, s, t, pattern: Pattern, params, rng, log: list) -> list[Embedding]:
    small, large = (s, t) if len(s) <= len(t) else (t, s)
    need = (len(large) - len(small)) // 2
    small_mask = mask_of(small)

    def cross_degree(v):
        return popcount(host.masks[v] & small_mask)

    for attempt in range(params.retry_cap):
        ties = rng.permutation(host.n).tolist() if attempt else list(range(host.n))
        order = sorted(large, key=lambda v: (cross_degree(v), ties[v]))
        matched, inner = set(), []
        for u in order:
            if len(inner) == need:
                break
            if u in matched:
                continue
            partners = [v for v in layer.neighbors(u) if v in large and v not in matched]
            if partners:
                v = min(partners, key=lambda w: (cross_degree(w), ties[w]))
                inner.append((u, v))
                matched.update((u, v))
        if len(inner) < need:
            raise StageFailure(f"sólo {len(inner)} de {need} aristas internas para igualar los lados")

        hall = hall_perfect_matching(host, small, large - matched)
        if hall.perfect:
            log.append(f"intento {attempt}: M con {len(inner)} aristas, Hall perfecto")
            pairs = inner + list(hall.matching.items())
            return [Embedding(pattern, (u, v), host) for u, v in pairs]
        log.append(f"intento {attempt}: violador de Hall con |W|={len(hall.violator)}")
        if need == 0:
            break
    raise StageFailure("no se encontró un emparejamiento perfecto")


# --- Ruta por etapas (|H| ≥ 3) ---

class _Stages:
    """Estado de la ruta por etapas; cada paso lanza ``StageFailure`` si no puede continuar."""

    def __init__(self, host: Graph, cross: Graph, layer: Graph, s, t, split: PatternSplit, params, rng, log):
        if len(s) > len(t):
            s, t = t, s
        self.host, self.cross, self.layer = host, cross, layer
        self.s, self.t = frozenset(s), frozenset(t)
        self.split, self.params, self.rng, self.log = split, params, rng, log
        self.h = split.h
        self.order = split.pattern.order
        self.big_n = Fraction(len(s) + len(t), 2)

    # utilidades

    def common_in(self, members, target) -> frozenset:
        return frozenset(bits_of(_common(self.host.masks, members, mask_of(target))))

    def good(self, members, other) -> bool:
        common = popcount(_common(self.cross.masks, members, mask_of(other)))
        return common >= self.params.d1 * len(other)

    def attach(self, apex: int, pool, other_side) -> tuple[int, ...]:
        """Una copia de H' dentro de ``pool`` ∩ N(apex), prefiriendo h-conjuntos excelentes."""
        candidates = _hprime_images(self.layer, self.split, self.common_in([apex], pool))
        if not candidates:
            raise StageFailure(f"el vértice {apex} no tiene copia de H' disponible")
        for image in candidates:
            if self.good(image, other_side):
                return image
        return candidates[0]

    def hall_all(self, x: list[int], m_prime: list[tuple[int, ...]], size: int) -> bool:
        """¿K[X', M'] tiene emparejamiento perfecto para todo X' ⊆ X con |X'| = |M'|?"""
        q = len(x)
        aux_edges = set()
        for j, image in enumerate(m_prime):
            nbrs = self.common_in(image, self.s)
            aux_edges.update((i, q + j) for i, a in enumerate(x) if a in nbrs)
        aux = Graph(q + len(m_prime), frozenset(aux_edges))
        subsets = list(combinations(range(q), size))
        cap = lab_setting("LAB_SUBSET_ENUMERATION_CAP", 200_000)
        if len(subsets) > cap:
            picks = self.rng.choice(len(subsets), size=cap, replace=False).tolist()
            subsets = [subsets[i] for i in picks]
        right = range(q, q + len(m_prime))
        return all(hall_perfect_matching(aux, sub, right).perfect for sub in subsets)

    # etapas

    def build_m(self) -> list[tuple[int, ...]]:
        images = [img for img in _hprime_images(self.layer, self.split, self.t) if self.good(img, self.s)]
        images.sort(key=lambda img: (-popcount(_common(self.cross.masks, img, mask_of(self.s))), img))
        used, m = set(), []
        for img in images:
            if used.isdisjoint(img):
                m.append(img)
                used.update(img)
        self.log.append(f"M: {len(m)} copias excelentes de H' en T")
        return m

    def choose_x(self, m: list[tuple[int, ...]], q: int, m_prime: int):
        s_list = sorted(self.s)
        if q > len(s_list) or m_prime > len(m):
            raise StageFailure(f"no caben |X|={q} y |M'|={m_prime} (|S|={len(s_list)}, |M|={len(m)})")
        for attempt in range(self.params.retry_cap):
            chosen = sorted(self.rng.choice(len(m), size=m_prime, replace=False).tolist())
            m_sel = [m[i] for i in chosen]
            x = sorted(self.rng.choice(s_list, size=q, replace=False).tolist())
            if self.hall_all(x, m_sel, m_prime):
                self.log.append(f"(X, M') aceptados en el intento {attempt}")
                return x, m_sel
        raise StageFailure(f"ningún (X, M') superó la verificación de Hall en {self.params.retry_cap} intentos")

    def run(self) -> list[Embedding]:
        p = self.params
        h, order = self.h, self.order
        q = math.ceil(p.phi * self.big_n)
        z = math.floor(p.phi * p.eps5 * self.big_n)
        m_prime = q - z
        m = self.build_m()
        x, m_sel = self.choose_x(m, q, m_prime)
        embeddings: list[Embedding] = []

        # (a) sobre (S, T ∖ V(M')) con Q = X
        t_rest = self.t - frozenset(v for image in m_sel for v in image)
        quota = z // h
        z_rest = z - h * quota
        q_set = frozenset(x)
        q_mask = mask_of(q_set)

        def into_q(v):
            return popcount(self.host.masks[v] & q_mask)

        t1 = {v for v in t_rest if into_q(v) < p.d1 * len(q_set)}
        pad = (len(t_rest) - len(t1) - quota) % order
        t1 |= set(sorted(t_rest - t1, key=lambda v: (into_q(v), v))[:pad])
        if len(t_rest) - len(t1) < quota:
            raise StageFailure("T ∖ T₁ no tiene sitio para T₂")

        free_s = set(self.s - q_set)
        for apex in sorted(t1, key=lambda v: (len(self.common_in([v], free_s)), v)):
            image = self.attach(apex, free_s, self.t)
            embeddings.append(self.split.assemble(image, apex, self.host))
            free_s -= set(image)
        self.log.append(f"𝒯₁: {len(t1)} S-copias absorben T₁")

        t2 = frozenset(self.rng.choice(sorted(t_rest - t1), size=quota, replace=False).tolist()) if quota else frozenset()
        q_prime = frozenset(sorted(q_set)[:z_rest])
        s_prime = frozenset(free_s) | q_prime
        t_prime = t_rest - t1 - t2
        if len(s_prime) % order or len(t_prime) % order:
            raise StageFailure(f"|S'|={len(s_prime)} o |T'|={len(t_prime)} no es divisible por {order}")

        t2_size = math.floor(p.phi * p.eps5 * p.d1 * self.big_n / (10 * h * h))
        den = h * h - 1
        a_num, b_num = h * len(s_prime) - len(t_prime), h * len(t_prime) - len(s_prime)
        if a_num % den or b_num % den:
            raise StageFailure(f"a o b no son enteros ({a_num}/{den}, {b_num}/{den})")
        a, b = a_num // den, b_num // den - t2_size
        if a < 0 or b < 0:
            raise StageFailure(f"a={a}, b={b}: el balance de 𝒯₂ es imposible")

        t2_mask, rest_q_mask = mask_of(t2), mask_of(q_set - q_prime)
        s_res = frozenset(
            sorted(s_prime, key=lambda v: (-popcount(self.host.masks[v] & t2_mask), v))[:t2_size]
        )
        t_res = frozenset(
            sorted(t_prime, key=lambda v: (-popcount(self.host.masks[v] & rest_q_mask), v))[: h * t2_size]
        )
        embeddings.extend(self.balanced_tiling(s_prime - s_res, t_prime - t_res, a, b))

        free_t2 = set(t2)
        for apex in sorted(s_res):
            image = self.attach(apex, free_t2, self.s)
            embeddings.append(self.split.assemble(image, apex, self.host))
            free_t2 -= set(image)
        self.log.append(f"𝒯₃: {len(s_res)} T-copias en T₂")

        leftover_t = sorted(t_res | frozenset(free_t2))
        if len(leftover_t) != quota:
            raise StageFailure(f"quedan {len(leftover_t)} vértices de T y se esperaban {quota}")
        free_q = set(q_set - q_prime)
        for apex in leftover_t:
            image = self.attach(apex, free_q, self.t)
            embeddings.append(self.split.assemble(image, apex, self.host))
            free_q -= set(image)
        self.log.append(f"𝒯₄: {len(leftover_t)} S-copias dentro de Q")

        if len(free_q) != m_prime:
            raise StageFailure(f"|X'|={len(free_q)} y |M'|={m_prime} no coinciden")
        embeddings.extend(self.close_with_matching(sorted(free_q), m_sel))
        return embeddings

    def balanced_tiling(self, s_cols, t_cols, a: int, b: int) -> list[Embedding]:
        """
        𝒯₂: a S-copias y b T-copias que cubren S' ∪ T'. Toma siempre el
        vértice libre con menos copias vivas; entre las copias por él
        prefiere el tipo más retrasado respecto de la proporción a:b y, a
        igualdad, la copia cuyos otros vértices tienen menos alternativas.
        El retroceso sólo revisa las ``BALANCED_BRANCHING`` mejores copias
        de cada paso, con ``BALANCED_NODES_PER_COPY`` nodos por copia como
        máximo.
        """
        rows = _typed_copies(self.host, self.layer, self.split, s_cols, t_cols)
        kinds = [0] * len(rows)
        t_rows = _typed_copies(self.host, self.layer, self.split, t_cols, s_cols)
        rows += t_rows
        kinds += [1] * len(t_rows)
        cover = ExactCover(sorted(s_cols | t_cols), {i: e.image for i, e in enumerate(rows)})
        cover.budget = min(self.params.budget, BALANCED_NODES_PER_COPY * (a + b + 1))
        quota = (a, b)
        left = [a, b]
        chosen: list[int] = []

        def options(v) -> int:
            if left[0] and left[1]:
                return len(cover.cols[v])
            return sum(1 for r in cover.cols[v] if left[kinds[r]])

        def behind() -> int:
            return 0 if left[0] * max(quota[1], 1) >= left[1] * max(quota[0], 1) else 1

        def search() -> bool:
            cover.tick()
            if not cover.cols:
                return True
            v = min(cover.cols, key=lambda c: (options(c), c))
            if not options(v):
                return False
            kind = behind()
            candidates = heapq.nsmallest(
                BALANCED_BRANCHING,
                (r for r in cover.cols[v] if left[kinds[r]]),
                key=lambda r: (kinds[r] != kind, sum(options(u) for u in rows[r].image if u != v), r),
            )
            for r in candidates:
                removed = cover.select(r)
                chosen.append(r)
                left[kinds[r]] -= 1
                if search():
                    return True
                left[kinds[r]] += 1
                chosen.pop()
                cover.deselect(r, removed)
            return False

        try:
            done = search()
        except BudgetExhausted:
            raise StageFailure(f"𝒯₂ agotó el presupuesto ({cover.budget} nodos)")
        if not done:
            raise StageFailure(f"𝒯₂ sin completar con {BALANCED_BRANCHING} alternativas por paso ({cover.nodes} nodos)")
        picked = [rows[i] for i in chosen]
        s_copies = sum(1 for i in chosen if kinds[i] == 0)
        if s_copies != a or len(picked) - s_copies != b:
            raise StageFailure(f"𝒯₂ tiene {s_copies} S-copias y {len(picked) - s_copies} T-copias (se esperaban {a} y {b})")
        self.log.append(f"𝒯₂: {a} S-copias y {b} T-copias ({cover.nodes} nodos)")
        return picked

    def close_with_matching(self, x_rest: list[int], m_sel: list[tuple[int, ...]]) -> list[Embedding]:
        q = len(x_rest)
        aux_edges = set()
        for j, image in enumerate(m_sel):
            nbrs = self.common_in(image, self.s)
            aux_edges.update((i, q + j) for i, a in enumerate(x_rest) if a in nbrs)
        aux = Graph(q + len(m_sel), frozenset(aux_edges))
        hall = hall_perfect_matching(aux, range(q), range(q, q + len(m_sel)))
        if not hall.perfect:
            raise StageFailure("K[X', M'] no tiene emparejamiento perfecto")
        self.log.append(f"cierre: {q} T-copias por emparejamiento X'–M'")
        return [self.split.assemble(m_sel[j - q], x_rest[i], self.host) for i, j in hall.matching.items()]


# --- Punto de entrada ---

def _fallback(host: Graph, s, t, pattern: Pattern, budget: int) -> tuple[str, Tiling | None]:
    sub, index_map = induced(host, s | t)
    result = perfect_tiling(sub, pattern, budget)
    if not result.found:
        return result.status, None
    return result.status, Tiling.from_embeddings(e.relabel(index_map, host) for e in result.tiling.embeddings)


def complete_pair_tiling(
    cross: Graph,
    random_layer: Graph,
    s,
    t,
    h: Pattern,
    params: PairCompletionParams | None = None,
    seed=0,
) -> PairCompletionResult:
    params = params or PairCompletionParams.from_settings()
    host = pair_host(cross, random_layer, s, t)
    s, t = vertex_set(host, s), vertex_set(host, t)
    if s & t:
        raise LabError("S y T deben ser disjuntos")
    if (len(s) + len(t)) % h.order:
        raise PairCompletionError(f"|S ∪ T| = {len(s) + len(t)} no es divisible por |H| = {h.order}")

    rng = as_seed(seed).generator()
    log: list[str] = []
    route = PairRoute.MATCHING if h.order == 2 else PairRoute.STAGED
    try:
        if route == PairRoute.MATCHING:
            embeddings = _matching_route(host, random_layer, s, t, h, params, rng, log)
        else:
            embeddings = _Stages(host, cross, random_layer, s, t, PatternSplit.of(h), params, rng, log).run()
        tiling = Tiling.from_embeddings(embeddings)
        problems = tiling_problems(tiling, host, h, cover=s | t)
        if problems:
            logger.error(f"❌ La ruta {route} produjo un certificado inválido: {problems[:3]}")
            raise StageFailure(f"certificado inválido: {problems[0]}")
        logger.info(f"✅ Par completado por la ruta {route} ({tiling.size} copias)")
        return PairCompletionResult(TilingStatus.FOUND, tiling, route, tuple(log), params.as_dict())
    except StageFailure as e:
        log.append(f"fallo: {e}")
        logger.info(f"⚠️ Ruta {route} fallida ({e}); se recurre al solver exacto")

    status, tiling = _fallback(host, s, t, h, params.budget)
    if tiling is not None and tiling_problems(tiling, host, h, cover=s | t):
        raise LabError("El solver exacto devolvió un certificado inválido")
    log.append(f"solver exacto: {status}")
    return PairCompletionResult(status, tiling, PairRoute.FALLBACK, tuple(log), params.as_dict())


# --- Divisibilidad entre pares ---

def repair_divisibility(host: Graph, pairs, pattern: Pattern) -> tuple[list[tuple[frozenset, frozenset]], Tiling]:
    """
    Quita copias con un vértice en el lado S del par i y |H|−1 en el par
    i+1 hasta que cada |S_i ∪ T_i| sea divisible por |H|. Devuelve los
    pares recortados y las copias retiradas.
    """
    order = pattern.order
    current = [(vertex_set(host, s), vertex_set(host, t)) for s, t in pairs]
    total = sum(len(s) + len(t) for s, t in current)
    if total % order:
        raise PairCompletionError(f"El total {total} no es divisible por |H| = {order}")

    removed: list[Embedding] = []
    for i in range(len(current) - 1):
        while (len(current[i][0]) + len(current[i][1])) % order:
            s_i, t_i = current[i]
            s_j, t_j = current[i + 1]
            target = s_j | t_j
            copy = next(
                (
                    c
                    for c in enumerate_copies(host, pattern, within=s_i | target)
                    if len(c.vertices & s_i) == 1 and len(c.vertices & target) == order - 1
                ),
                None,
            )
            if copy is None:
                raise PairCompletionError(f"No hay copia que conecte el par {i} con el par {i + 1}")
            removed.append(copy)
            current[i] = (s_i - copy.vertices, t_i)
            current[i + 1] = (s_j - copy.vertices, t_j - copy.vertices)

    tiling = Tiling.from_embeddings(removed)
    problems = tiling_problems(tiling, host, pattern)
    if problems:
        raise LabError(f"Copias de reparación inválidas: {problems[0]}")
    logger.debug(f"Divisibilidad reparada con {tiling.size} copias")
    return current, tiling
