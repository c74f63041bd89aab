"""
Pares bipartitos, ε-regularidad y super-regularidad.

Modo exacto: se recorren todos los X ⊆ A con |X| ≥ ⌈ε|A|⌉ (máscaras
crecientes sobre A ordenado). Para cada X y cada tamaño k de Y, los Y más
densos y menos densos son los k vértices de B con más y con menos vecinos
en X, así que basta con sumas prefijas de los grados ordenados. Las
comparaciones con ε = p/q se hacen en enteros.

Todo testigo (X, Y) devuelto se vuelve a comprobar con la definición.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
from django.db import models

from graphs.exceptions import IrregularPairError, LabError, RegularityCapError
from graphs.random_models import as_seed
from graphs.structures import Graph, degree_into, edges_between, vertex_set
from graphs.utils import as_fraction, format_fraction, lab_setting

logger = logging.getLogger(__name__)

DEFAULT_EXACT_CAP = 16
DEFAULT_TRIALS = 2000


class RegularityVerdict(models.TextChoices):
    YES = "yes", "Regular"
    NO = "no", "Irregular (testigo)"
    SAMPLED_PLAUSIBLE = "sampled-plausible", "Plausible (muestreo)"


class CheckMode(models.TextChoices):
    AUTO = "auto", "Auto"
    EXACT = "exact", "Exact"
    SAMPLED = "sampled", "Sampled"


@dataclass(frozen=True)
class BipartitePair:
    host: Graph = field(repr=False)
    side_a: frozenset
    side_b: frozenset

    @classmethod
    def create(cls, host: Graph, a, b) -> "BipartitePair":
        side_a, side_b = vertex_set(host, a), vertex_set(host, b)
        if not side_a or not side_b:
            raise LabError("Los dos lados del par deben ser no vacíos")
        if side_a & side_b:
            raise LabError(f"Los lados del par no son disjuntos: {sorted(side_a & side_b)}")
        return cls(host, side_a, side_b)

    @cached_property
    def a_list(self) -> tuple[int, ...]:
        return tuple(sorted(self.side_a))

    @cached_property
    def b_list(self) -> tuple[int, ...]:
        return tuple(sorted(self.side_b))

    @cached_property
    def matrix(self) -> np.ndarray:
        """Matriz de biadyacencia |A|×|B| en el orden de ``a_list`` y ``b_list``."""
        m = np.zeros((len(self.a_list), len(self.b_list)), dtype=np.int64)
        col = {b: j for j, b in enumerate(self.b_list)}
        for i, a in enumerate(self.a_list):
            for b in self.host.neighbors(a):
                j = col.get(b)
                if j is not None:
                    m[i, j] = 1
        return m

    @cached_property
    def edge_count(self) -> int:
        return int(self.matrix.sum())

    @property
    def density(self) -> Fraction:
        return Fraction(self.edge_count, len(self.side_a) * len(self.side_b))


def pair_density(host: Graph, a, b) -> Fraction:
    """d(A,B) = e(A,B)/(|A||B|), calculada directamente sobre las aristas."""
    pair = BipartitePair.create(host, a, b)
    return Fraction(edges_between(host, pair.side_a, pair.side_b), len(pair.side_a) * len(pair.side_b))


@dataclass(frozen=True)
class RegularityReport:
    eps: Fraction
    verdict: str
    witness: tuple[frozenset, frozenset] | None
    checked_pairs: int
    density: Fraction
    witness_density: Fraction | None = None

    @property
    def regular(self) -> bool:
        return self.verdict != RegularityVerdict.NO

    def as_dict(self) -> dict:
        return {
            "eps": format_fraction(self.eps),
            "verdict": str(self.verdict),
            "density": format_fraction(self.density),
            "witness": [sorted(self.witness[0]), sorted(self.witness[1])] if self.witness else None,
            "witness_density": format_fraction(self.witness_density) if self.witness_density is not None else None,
            "checked_pairs": self.checked_pairs,
        }


def _check_eps(eps) -> Fraction:
    eps = as_fraction(eps)
    if not (0 < eps <= 1):
        raise LabError(f"eps debe estar en (0, 1] (recibido {format_fraction(eps)})")
    return eps


def _min_size(eps: Fraction, size: int) -> int:
    return max(1, math.ceil(eps * size))


def is_irregularity_witness(host: Graph, a, b, x, y, eps) -> bool:
    """Comprueba (X, Y) contra la definición: tamaños mínimos y |d(A,B) − d(X,Y)| ≥ ε."""
    eps = as_fraction(eps)
    a, b, x, y = frozenset(a), frozenset(b), frozenset(x), frozenset(y)
    if not x or not y or not x <= a or not y <= b:
        return False
    if len(x) < eps * len(a) or len(y) < eps * len(b):
        return False
    return abs(pair_density(host, a, b) - pair_density(host, x, y)) >= eps


def _exact_cap(cap) -> int:
    return cap if cap is not None else lab_setting("LAB_REGULARITY_EXACT_CAP", DEFAULT_EXACT_CAP)


def _require_exact_sizes(pair: BipartitePair, cap: int):
    largest = max(len(pair.side_a), len(pair.side_b))
    if largest > cap:
        raise RegularityCapError(
            f"Modo exacto limitado a lados de tamaño ≤ {cap} (recibido {largest}); usa el modo 'sampled'"
        )


def _x_subsets(size: int, min_size: int):
    """Máscaras crecientes de X con |X| ≥ min_size, su matriz indicadora y sus tamaños."""
    masks = np.arange(1, 1 << size, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(size, dtype=np.int64)) & 1
    sizes = bits.sum(axis=1)
    keep = sizes >= min_size
    return masks[keep], bits[keep], sizes[keep]


def _labels(mask_bits: np.ndarray, labels: tuple[int, ...]) -> frozenset:
    return frozenset(labels[i] for i in np.flatnonzero(mask_bits).tolist())


def check_eps_regular_exact(host: Graph, a, b, eps, cap: int | None = None) -> RegularityReport:
    """
    Decide la ε-regularidad de (A, B) recorriendo todos los X. El testigo es
    el primero en el orden (X por máscara, |Y| creciente, Y más denso antes
    que el menos denso).
    """
    eps = _check_eps(eps)
    pair = BipartitePair.create(host, a, b)
    _require_exact_sizes(pair, _exact_cap(cap))
    na, nb = len(pair.a_list), len(pair.b_list)
    kx, ky = _min_size(eps, na), _min_size(eps, nb)
    p, q = eps.numerator, eps.denominator
    area, total = na * nb, pair.edge_count

    _, bits, sizes = _x_subsets(na, kx)
    degs = bits @ pair.matrix
    densest = np.cumsum(-np.sort(-degs, axis=1), axis=1)[:, ky - 1:]
    sparsest = np.cumsum(np.sort(degs, axis=1), axis=1)[:, ky - 1:]
    ks = np.arange(ky, nb + 1, dtype=np.int64)
    xk = sizes[:, None] * ks[None, :]
    bound = p * area * xk
    violations = np.stack(
        [
            q * np.abs(densest * area - total * xk) >= bound,
            q * np.abs(sparsest * area - total * xk) >= bound,
        ],
        axis=-1,
    )

    hits = np.flatnonzero(violations.ravel())
    if hits.size == 0:
        logger.debug(f"✅ Par {na}×{nb} {format_fraction(eps)}-regular ({violations.size} candidatos)")
        return RegularityReport(eps, RegularityVerdict.YES, None, int(violations.size), pair.density)

    first = int(hits[0])
    row, k_index, side = np.unravel_index(first, violations.shape)
    k = int(ks[k_index])
    order = np.argsort(-degs[row] if side == 0 else degs[row], kind="stable")[:k]
    x = _labels(bits[row], pair.a_list)
    y = frozenset(pair.b_list[j] for j in order.tolist())
    if not is_irregularity_witness(host, pair.side_a, pair.side_b, x, y, eps):
        raise LabError("El testigo de irregularidad no supera la verificación")
    return RegularityReport(eps, RegularityVerdict.NO, (x, y), first + 1, pair.density, pair_density(host, x, y))


def check_eps_regular_sampled(host: Graph, a, b, eps, trials: int = DEFAULT_TRIALS, seed=0) -> RegularityReport:
    """
    Muestrea X e Y uniformes de tamaños ⌈ε|A|⌉ y ⌈ε|B|⌉. Un "no" es cierto;
    "sampled-plausible" solo dice que no se encontró testigo.
    """
    eps = _check_eps(eps)
    if trials < 1:
        raise LabError("trials debe ser al menos 1")
    pair = BipartitePair.create(host, a, b)
    na, nb = len(pair.a_list), len(pair.b_list)
    kx, ky = _min_size(eps, na), _min_size(eps, nb)
    p, q = eps.numerator, eps.denominator
    area, total = na * nb, pair.edge_count
    matrix = pair.matrix
    rng = as_seed(seed).generator()

    for trial in range(trials):
        xi = np.sort(rng.choice(na, size=kx, replace=False))
        yi = np.sort(rng.choice(nb, size=ky, replace=False))
        e = int(matrix[np.ix_(xi, yi)].sum())
        if q * abs(e * area - total * kx * ky) >= p * area * kx * ky:
            x = frozenset(pair.a_list[i] for i in xi.tolist())
            y = frozenset(pair.b_list[j] for j in yi.tolist())
            if not is_irregularity_witness(host, pair.side_a, pair.side_b, x, y, eps):
                raise LabError("El testigo muestreado no supera la verificación")
            return RegularityReport(eps, RegularityVerdict.NO, (x, y), trial + 1, pair.density, Fraction(e, kx * ky))
    return RegularityReport(eps, RegularityVerdict.SAMPLED_PLAUSIBLE, None, trials, pair.density)


def check_eps_regular(host: Graph, a, b, eps, mode: str = CheckMode.AUTO, trials: int = DEFAULT_TRIALS, seed=0) -> RegularityReport:
    """Exacto si ambos lados caben bajo el límite (o si se pide), muestreado en otro caso."""
    pair = BipartitePair.create(host, a, b)
    if _resolve_mode(pair, mode) == CheckMode.EXACT:
        return check_eps_regular_exact(host, pair.side_a, pair.side_b, eps)
    return check_eps_regular_sampled(host, pair.side_a, pair.side_b, eps, trials, seed)


def _resolve_mode(pair: BipartitePair, mode: str) -> str:
    if mode not in CheckMode.values:
        raise LabError(f"Modo desconocido '{mode}' (usa auto|exact|sampled)")
    if mode == CheckMode.AUTO:
        fits = max(len(pair.side_a), len(pair.side_b)) <= _exact_cap(None)
        return CheckMode.EXACT if fits else CheckMode.SAMPLED
    return mode


# --- Super-regularidad ---

@dataclass(frozen=True)
class SuperRegularityReport:
    holds: bool
    eps: Fraction
    d: Fraction
    mode: str
    failing_vertex: int | None = None
    witness: tuple[frozenset, frozenset] | None = None
    witness_density: Fraction | None = None
    checked_pairs: int = 0

    def __bool__(self):
        return self.holds

    def as_dict(self) -> dict:
        return {
            "holds": self.holds,
            "eps": format_fraction(self.eps),
            "d": format_fraction(self.d),
            "mode": str(self.mode),
            "one_sided": self.mode == CheckMode.SAMPLED and self.holds,
            "failing_vertex": self.failing_vertex,
            "witness": [sorted(self.witness[0]), sorted(self.witness[1])] if self.witness else None,
            "witness_density": format_fraction(self.witness_density) if self.witness_density is not None else None,
            "checked_pairs": self.checked_pairs,
        }


def _degree_failure(host: Graph, pair: BipartitePair, d: Fraction) -> int | None:
    """Primer vértice con grado cruzado ≤ d·|lado opuesto| (primero A, luego B)."""
    for side, other in ((pair.a_list, pair.side_b), (pair.b_list, pair.side_a)):
        for v in side:
            if not degree_into(host, v, other) > d * len(other):
                return v
    return None


def check_super_regular(
    host: Graph,
    a,
    b,
    eps,
    d,
    mode: str = CheckMode.AUTO,
    trials: int = DEFAULT_TRIALS,
    seed=0,
) -> SuperRegularityReport:
    """
    (ε,d)-super-regularidad: d(X,Y) > d para todo X, Y de tamaños ≥ ε|A|, ε|B|
    y grado cruzado > d·|lado opuesto| en cada vértice.
    """
    eps = _check_eps(eps)
    d = as_fraction(d)
    if not (0 <= d < 1):
        raise LabError(f"d debe estar en [0, 1) (recibido {format_fraction(d)})")
    pair = BipartitePair.create(host, a, b)
    mode = _resolve_mode(pair, mode)

    failing = _degree_failure(host, pair, d)
    if failing is not None:
        return SuperRegularityReport(False, eps, d, mode, failing_vertex=failing)

    na, nb = len(pair.a_list), len(pair.b_list)
    kx, ky = _min_size(eps, na), _min_size(eps, nb)
    p, q = d.numerator, d.denominator

    if mode == CheckMode.EXACT:
        _require_exact_sizes(pair, _exact_cap(None))
        _, bits, sizes = _x_subsets(na, kx)
        degs = bits @ pair.matrix
        sparsest = np.cumsum(np.sort(degs, axis=1), axis=1)[:, ky - 1:]
        ks = np.arange(ky, nb + 1, dtype=np.int64)
        violations = q * sparsest <= p * (sizes[:, None] * ks[None, :])
        hits = np.flatnonzero(violations.ravel())
        if hits.size == 0:
            return SuperRegularityReport(True, eps, d, mode, checked_pairs=int(violations.size))
        row, k_index = np.unravel_index(int(hits[0]), violations.shape)
        order = np.argsort(degs[row], kind="stable")[: int(ks[k_index])]
        x = _labels(bits[row], pair.a_list)
        y = frozenset(pair.b_list[j] for j in order.tolist())
        return SuperRegularityReport(
            False, eps, d, mode, witness=(x, y), witness_density=pair_density(host, x, y), checked_pairs=int(hits[0]) + 1
        )

    rng = as_seed(seed).generator()
    matrix = pair.matrix
    for trial in range(trials):
        xi = np.sort(rng.choice(na, size=kx, replace=False))
        yi = np.sort(rng.choice(nb, size=ky, replace=False))
        e = int(matrix[np.ix_(xi, yi)].sum())
        if q * e <= p * kx * ky:
            x = frozenset(pair.a_list[i] for i in xi.tolist())
            y = frozenset(pair.b_list[j] for j in yi.tolist())
            return SuperRegularityReport(
                False, eps, d, mode, witness=(x, y), witness_density=Fraction(e, kx * ky), checked_pairs=trial + 1
            )
    return SuperRegularityReport(True, eps, d, mode, checked_pairs=trials)


@dataclass(frozen=True)
class SuperRegularPair:
    side_a: frozenset
    side_b: frozenset
    removed_a: frozenset
    removed_b: frozenset
    rounds: int
    report: SuperRegularityReport

    def as_dict(self) -> dict:
        return {
            "side_a": sorted(self.side_a),
            "side_b": sorted(self.side_b),
            "removed_a": sorted(self.removed_a),
            "removed_b": sorted(self.removed_b),
            "rounds": self.rounds,
            "verification": self.report.as_dict(),
        }


def _low_degree(host: Graph, side: frozenset, other: frozenset, threshold: Fraction) -> frozenset:
    return frozenset(v for v in side if degree_into(host, v, other) <= threshold)


def superregularize(
    host: Graph,
    a,
    b,
    eps,
    d,
    mode: str = CheckMode.AUTO,
    trials: int = DEFAULT_TRIALS,
    seed=0,
) -> SuperRegularPair:
    """
    Recorta un par ε-regular de densidad ≥ d hasta un par (2ε, d−3ε)-super-regular
    quitando como mucho una fracción ε de cada lado.

    Primera ronda: fuera los vértices con grado cruzado ≤ (d−ε)·|lado opuesto|.
    Si la verificación falla se repite con el umbral (d−3ε)·|lado opuesto
    actual| hasta un punto fijo. Si el recorte se pasa de ε se comprueba la
    regularidad de la entrada y se lanza ``IrregularPairError`` con ese informe.
    """
    eps = _check_eps(eps)
    d = as_fraction(d)
    if not eps < Fraction(1, 3):
        raise LabError("superregularize necesita eps < 1/3")
    pair = BipartitePair.create(host, a, b)
    target_eps, target_d = 2 * eps, max(Fraction(0), d - 3 * eps)

    def broken_promise(reason: str):
        report = check_eps_regular(host, pair.side_a, pair.side_b, eps, mode, trials, seed)
        logger.warning(
            f"⚠️ superregularize: {reason}; densidad {format_fraction(pair.density)}, "
            f"regularidad de la entrada: {report.verdict}"
        )
        raise IrregularPairError(f"El par no cumple la promesa de ε-regularidad con densidad ≥ d: {reason}", report=report)

    side_a, side_b = pair.side_a, pair.side_b
    removed_a = _low_degree(host, side_a, pair.side_b, (d - eps) * len(pair.side_b))
    removed_b = _low_degree(host, side_b, pair.side_a, (d - eps) * len(pair.side_a))
    rounds = 1
    while True:
        if len(removed_a) > eps * len(pair.side_a) or len(removed_b) > eps * len(pair.side_b):
            broken_promise(f"se recortaron {len(removed_a)}+{len(removed_b)} vértices")
        side_a, side_b = pair.side_a - removed_a, pair.side_b - removed_b
        report = check_super_regular(host, side_a, side_b, target_eps, target_d, mode, trials, seed)
        if report.holds:
            logger.debug(f"✅ Par super-regular tras {rounds} ronda(s): {len(side_a)}×{len(side_b)}")
            return SuperRegularPair(side_a, side_b, removed_a, removed_b, rounds, report)
        extra_a = _low_degree(host, side_a, side_b, target_d * len(side_b))
        extra_b = _low_degree(host, side_b, side_a, target_d * len(side_a))
        if not extra_a and not extra_b:
            broken_promise("la verificación encontró un testigo de densidad")
        removed_a, removed_b = removed_a | extra_a, removed_b | extra_b
        rounds += 1


# --- Grafo reducido ---

@dataclass(frozen=True)
class ReducedGraph:
    graph: Graph
    clusters: tuple[frozenset, ...]
    reports: dict

    def as_dict(self) -> dict:
        return {
            "clusters": [sorted(c) for c in self.clusters],
            "edges": [list(e) for e in self.graph.sorted_edges],
            "pairs": {f"{i}-{j}": report.as_dict() for (i, j), report in sorted(self.reports.items())},
        }


def reduced_graph(host: Graph, clusters, eps, d, mode: str = CheckMode.AUTO, trials: int = DEFAULT_TRIALS, seed=0) -> ReducedGraph:
    """Grafo de clústeres: arista i–j si el par (V_i, V_j) es ε-regular y de densidad > d."""
    d = as_fraction(d)
    parts = tuple(vertex_set(host, c) for c in clusters)
    seen = set()
    for part in parts:
        if seen & part:
            raise LabError("Los clústeres deben ser disjuntos")
        seen |= part
    edges, reports = set(), {}
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            report = check_eps_regular(host, parts[i], parts[j], eps, mode, trials, as_seed(seed).derive(i, j))
            reports[(i, j)] = report
            if report.regular and report.density > d:
                edges.add((i, j))
    logger.debug(f"Grafo reducido: {len(parts)} clústeres, {len(edges)} pares regulares y densos")
    return ReducedGraph(Graph(len(parts), frozenset(edges)), parts, reports)
