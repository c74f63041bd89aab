"""
Motor de tilings: decisión exacta de tilings perfectos, tiling máximo por
ramificación y acotación, y un voraz con reinicios.

Las tres búsquedas trabajan sobre ``ExactCover``, un Algorithm X con
diccionarios de conjuntos: ``cols[v]`` son las copias aún vivas que pasan
por el vértice v y ``rows[i]`` los vértices de la copia i. Seleccionar una
copia elimina sus vértices y todas las copias que chocan con ella;
deshacer restaura exactamente el estado anterior.

El presupuesto se mide en nodos de búsqueda, no en tiempo, para que los
resultados sean idénticos en cualquier máquina.
"""

import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from django.db import models

from densities.invariants import Pattern
from graphs.exceptions import DensityError, LabError
from graphs.random_models import Seed, as_seed
from graphs.structures import Graph
from graphs.utils import as_fraction, lab_setting

from .certificates import Tiling, tiling_problems
from .copies import CopyIndex

logger = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 200_000
DEFAULT_GREEDY_PASSES = 16


class TilingStatus(models.TextChoices):
    FOUND = "found", "Found"
    NONE_EXISTS = "none_exists", "None exists"
    UNKNOWN = "unknown", "Unknown"


@dataclass(frozen=True)
class TilingResult:
    status: str
    tiling: Tiling | None
    nodes_explored: int
    elapsed: float

    @property
    def found(self) -> bool:
        return self.status == TilingStatus.FOUND

    def as_dict(self) -> dict:
        return {
            "status": str(self.status),
            "size": self.tiling.size if self.tiling else 0,
            "tiling": self.tiling.vertex_lists() if self.tiling else None,
            "nodes_explored": self.nodes_explored,
            "elapsed": round(self.elapsed, 6),
        }


@dataclass(frozen=True)
class MaxTilingResult:
    size: int
    tiling: Tiling
    exact: bool
    nodes_explored: int

    def as_dict(self) -> dict:
        return {
            "size": self.size,
            "exact": self.exact,
            "coverage": self.tiling.coverage,
            "tiling": self.tiling.vertex_lists(),
            "nodes_explored": self.nodes_explored,
        }


class BudgetExhausted(Exception):
    pass


class ExactCover:
    def __init__(self, columns: Iterable, rows: dict):
        self.rows = rows
        self.cols = {c: set() for c in columns}
        for r, members in rows.items():
            for c in members:
                self.cols[c].add(r)
        self.nodes = 0
        self.budget = None

    # --- Operaciones reversibles ---

    def select(self, r) -> list:
        removed = []
        for j in self.rows[r]:
            for i in self.cols[j]:
                for k in self.rows[i]:
                    if k != j:
                        self.cols[k].discard(i)
            removed.append(self.cols.pop(j))
        return removed

    def deselect(self, r, removed: list):
        for j in reversed(self.rows[r]):
            self.cols[j] = removed.pop()
            for i in self.cols[j]:
                for k in self.rows[i]:
                    if k != j:
                        self.cols[k].add(i)

    def drop(self, c) -> set:
        """Renuncia a cubrir ``c``: quita la columna y todas sus filas."""
        rows = self.cols.pop(c)
        for i in rows:
            for k in self.rows[i]:
                if k != c:
                    self.cols[k].discard(i)
        return rows

    def undrop(self, c, rows: set):
        for i in rows:
            for k in self.rows[i]:
                if k != c:
                    self.cols[k].add(i)
        self.cols[c] = rows

    def tick(self):
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise BudgetExhausted()

    # --- Cobertura exacta completa ---

    def solve(self, budget: int | None = None, branching: str = "lowest", rng=None) -> list | None:
        """
        Filas de una cobertura exacta o ``None`` si no existe. Lanza
        ``BudgetExhausted`` si se agota el presupuesto. ``branching`` es
        "lowest" (columna de menor índice) o "fewest" (menos filas vivas).
        """
        self.budget = budget
        solution: list = []
        return solution if self._search(solution, branching, rng) else None

    def _search(self, solution: list, branching: str, rng) -> bool:
        self.tick()
        if not self.cols:
            return True
        if branching == "fewest":
            c = min(self.cols, key=lambda col: (len(self.cols[col]), col))
            if not self.cols[c]:
                return False
        else:
            if any(not rows for rows in self.cols.values()):
                return False
            c = min(self.cols)
        candidates = sorted(self.cols[c])
        if rng is not None:
            rng.shuffle(candidates)
        for r in candidates:
            removed = self.select(r)
            solution.append(r)
            if self._search(solution, branching, rng):
                return True
            solution.pop()
            self.deselect(r, removed)
        return False


def _require_edges(h: Pattern):
    if h.size == 0:
        raise DensityError("El patrón de tiling necesita al menos una arista")


def _validated(tiling: Tiling, g: Graph, h: Pattern, perfect: bool) -> Tiling:
    problems = tiling_problems(tiling, g, h, perfect=perfect)
    if problems:
        logger.error(f"❌ Certificado inválido: {problems[:3]}")
        raise LabError(f"El solver produjo un certificado inválido: {problems[0]}")
    return tiling


def _rows_of(index: CopyIndex) -> dict:
    return {i: c.image for i, c in enumerate(index.copies)}


def perfect_tiling(g: Graph, h: Pattern, budget: int | None = None, index: CopyIndex | None = None) -> TilingResult:
    """
    Decide si ``g`` tiene un H-tiling perfecto. Ramifica sobre el vértice
    descubierto de menor índice y poda en cuanto algún vértice descubierto se
    queda sin copias vivas.
    """
    _require_edges(h)
    if budget is None:
        budget = lab_setting("LAB_NODE_BUDGET", DEFAULT_NODE_BUDGET)
    start = time.perf_counter()
    if g.n % h.order:
        return TilingResult(TilingStatus.NONE_EXISTS, None, 0, time.perf_counter() - start)

    index = index or CopyIndex(g, h)
    cover = ExactCover(range(g.n), _rows_of(index))
    try:
        rows = cover.solve(budget, branching="lowest")
    except BudgetExhausted:
        logger.debug(f"⚠️ Presupuesto agotado ({budget} nodos) buscando tiling de {h} en {g!r}")
        return TilingResult(TilingStatus.UNKNOWN, None, cover.nodes - 1, time.perf_counter() - start)

    elapsed = time.perf_counter() - start
    if rows is None:
        logger.debug(f"Sin tiling perfecto de {h} en {g!r} ({cover.nodes} nodos)")
        return TilingResult(TilingStatus.NONE_EXISTS, None, cover.nodes, elapsed)

    tiling = _validated(Tiling.from_embeddings(index.copies[r] for r in rows), g, h, perfect=True)
    logger.debug(f"✅ Tiling perfecto encontrado ({tiling.size} copias, {cover.nodes} nodos)")
    return TilingResult(TilingStatus.FOUND, tiling, cover.nodes, elapsed)


def _greedy_pass(index: CopyIndex, n: int, rng) -> list[int]:
    """
    Una pasada voraz: toma el vértice con menos copias vivas (empates al
    azar) y la copia por él cuyos demás vértices tienen menos alternativas.
    """
    cover = ExactCover(range(n), _rows_of(index))
    for c in [c for c, rows in cover.cols.items() if not rows]:
        cover.cols.pop(c)
    chosen = []
    while cover.cols:
        fewest = min(len(rows) for rows in cover.cols.values())
        tied = sorted(c for c, rows in cover.cols.items() if len(rows) == fewest)
        c = tied[int(rng.integers(len(tied)))]
        candidates = sorted(cover.cols[c])
        scores = [sum(len(cover.cols[v]) for v in index.copies[r].image if v != c) for r in candidates]
        best = min(scores)
        pool = [r for r, s in zip(candidates, scores) if s == best]
        r = pool[int(rng.integers(len(pool)))]
        cover.select(r)
        chosen.append(r)
        for v in [v for v, rows in cover.cols.items() if not rows]:
            cover.cols.pop(v)
    return chosen


def max_tiling_greedy(
    g: Graph,
    h: Pattern,
    seed=0,
    passes: int | None = None,
    index: CopyIndex | None = None,
) -> Tiling:
    """Tiling maximal (no extensible); se queda con la mejor de ``passes`` pasadas."""
    _require_edges(h)
    if passes is None:
        passes = lab_setting("LAB_GREEDY_PASSES", DEFAULT_GREEDY_PASSES)
    seed = as_seed(seed)
    index = index or CopyIndex(g, h)
    best: list[int] = []
    for i in range(passes):
        chosen = _greedy_pass(index, g.n, seed.derive("greedy", i).generator())
        if len(chosen) > len(best):
            best = chosen
        if len(best) * h.order > g.n - h.order:
            break
    return _validated(Tiling.from_embeddings(index.copies[r] for r in best), g, h, perfect=False)


def max_tiling_exact(g: Graph, h: Pattern, budget: int | None = None, index: CopyIndex | None = None) -> MaxTilingResult:
    """
    Tiling máximo por ramificación y acotación. En cada nodo se ramifica
    sobre el vértice con menos copias vivas: o bien lo cubre alguna de
    ellas, o bien queda descubierto. Cota: actual + ⌊cubribles/|H|⌋.
    """
    _require_edges(h)
    if budget is None:
        budget = lab_setting("LAB_NODE_BUDGET", DEFAULT_NODE_BUDGET)
    index = index or CopyIndex(g, h)
    k = h.order
    ceiling = g.n // k

    start_tiling = max_tiling_greedy(g, h, Seed(0), passes=1, index=index)
    best = {"rows": [index.copies.index(e) for e in start_tiling.embeddings]}
    if len(best["rows"]) == ceiling:
        return MaxTilingResult(ceiling, start_tiling, True, 0)

    cover = ExactCover(range(g.n), _rows_of(index))
    cover.budget = budget
    current: list[int] = []

    class Optimal(Exception):
        pass

    def search():
        cover.tick()
        empties = [c for c, rows in cover.cols.items() if not rows]
        for c in empties:
            cover.cols.pop(c)
        try:
            if len(current) + len(cover.cols) // k <= len(best["rows"]):
                return
            if not cover.cols:
                best["rows"] = list(current)
                if len(current) == ceiling:
                    raise Optimal()
                return
            c = min(cover.cols, key=lambda col: (len(cover.cols[col]), col))
            for r in sorted(cover.cols[c]):
                removed = cover.select(r)
                current.append(r)
                try:
                    search()
                finally:
                    current.pop()
                    cover.deselect(r, removed)
            rows = cover.drop(c)
            try:
                search()
            finally:
                cover.undrop(c, rows)
        finally:
            for c in empties:
                cover.cols[c] = set()

    exact = True
    try:
        search()
    except Optimal:
        pass
    except BudgetExhausted:
        exact = False
        logger.debug(f"⚠️ Presupuesto agotado en tiling máximo; se devuelve la mejor solución ({len(best['rows'])})")

    tiling = _validated(Tiling.from_embeddings(index.copies[r] for r in best["rows"]), g, h, perfect=False)
    return MaxTilingResult(tiling.size, tiling, exact, cover.nodes)


def almost_perfect_coverage(g: Graph, h: Pattern, eps, budget: int | None = None, seed=0) -> bool:
    """
    ¿Hay un H-tiling que cubra al menos (1−eps)·|g| vértices? Primero el
    voraz, luego el exacto dentro del presupuesto. Un ``False`` puede
    significar solo "no encontrado".
    """
    eps = as_fraction(eps)
    if not (0 < eps < 1):
        raise LabError("eps debe estar en (0, 1)")
    target = (1 - eps) * g.n
    index = CopyIndex(g, h)
    if Fraction(max_tiling_greedy(g, h, seed, index=index).coverage) >= target:
        return True
    result = max_tiling_exact(g, h, budget, index=index)
    return Fraction(result.tiling.coverage) >= target
