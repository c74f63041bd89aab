"""
Barridos Monte Carlo sobre el modelo perturbado G ∪ G(n,p).

Cada ensayo (n, trial) es una tarea independiente con su propia sub-semilla
``Seed(seed).derive(n, trial)``. Dentro de un ensayo:

- la base se construye con ``derive("base")`` y los uniformes de la capa
  aleatoria con ``derive("random")``, igual que ``sample_perturbed``;
- con acoplamiento, todos los c del grid comparten uniformes, así que los
  anfitriones están anidados y un tiling perfecto encontrado en c₁ se
  re-valida y se reutiliza en c₂ ≥ c₁;
- si hay varias bases (comparación), una base cuyas aristas contienen a las
  de otra anterior hereda sus certificados para el mismo c.

Cada certificado heredado se vuelve a validar contra el anfitrión nuevo; la
herencia nunca se da por supuesta.
"""

import logging
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING

import django
import networkx
import numpy
import scipy
from scipy.stats import binomtest
from tqdm import tqdm

from densities.invariants import Pattern, perturbed_probability
from graphs.exceptions import LabError
from graphs.random_models import (
    BaseDescriptor,
    Seed,
    graph_from_uniforms,
    make_extremal_base,
    pair_uniforms,
)
from graphs.structures import induced, union
from graphs.utils import as_fraction, format_fraction
from tilings.certificates import Tiling, is_valid_tiling
from tilings.copies import CopyIndex
from tilings.solver import TilingStatus, max_tiling_exact, max_tiling_greedy, perfect_tiling

if TYPE_CHECKING:
    from .config import SweepConfig

logger = logging.getLogger(__name__)

CONFIDENCE = 0.95
REACH_RATE = Fraction(4, 5)
LOG_FACTOR_NOTE = (
    "A escala de escritorio el factor logarítmico entre ambas curvas no se puede "
    "resolver; la comparación es cualitativa."
)


class RunKind:
    SWEEP = "SWEEP"
    EXTREMAL_DEMO = "EXTREMAL_DEMO"
    BASE_COMPARISON = "BASE_COMPARISON"


# --- Tipos de resultado ---

@dataclass(frozen=True)
class TrialOutcome:
    """Resultado de un ensayo para una base: un estado y una cobertura por cada c."""

    n: int
    trial: int
    base: str
    statuses: tuple[str, ...]
    coverages: tuple[float, ...]
    wall_ms: tuple[float, ...]
    y_coverages: tuple[int, ...] = ()

    def as_dict(self) -> dict:
        data = {
            "n": self.n,
            "trial": self.trial,
            "base": self.base,
            "statuses": list(self.statuses),
            "coverages": list(self.coverages),
            "wall_ms": list(self.wall_ms),
        }
        if self.y_coverages:
            data["y_coverages"] = list(self.y_coverages)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "TrialOutcome":
        return cls(
            n=data["n"],
            trial=data["trial"],
            base=data["base"],
            statuses=tuple(data["statuses"]),
            coverages=tuple(data["coverages"]),
            wall_ms=tuple(data["wall_ms"]),
            y_coverages=tuple(data.get("y_coverages", ())),
        )


@dataclass(frozen=True)
class SweepRow:
    n: int
    c: Fraction
    p: float
    trials: int
    found: int
    certified_no: int
    unknown: int
    mean_coverage: float
    wall_time_ms: float

    @property
    def lower(self) -> float:
        return self.found / self.trials

    @property
    def upper(self) -> float:
        return (self.found + self.unknown) / self.trials

    def confidence_interval(self) -> tuple[float, float]:
        """Clopper–Pearson al 95 % por debajo de ``lower`` y por encima de ``upper``."""
        low = binomtest(self.found, self.trials).proportion_ci(CONFIDENCE, method="exact").low
        high = binomtest(self.found + self.unknown, self.trials).proportion_ci(CONFIDENCE, method="exact").high
        return float(low), float(high)

    def as_dict(self) -> dict:
        ci_low, ci_high = self.confidence_interval()
        return {
            "n": self.n,
            "c": format_fraction(self.c),
            "p": self.p,
            "trials": self.trials,
            "found": self.found,
            "certified_no": self.certified_no,
            "unknown": self.unknown,
            "mean_coverage": self.mean_coverage,
            "wall_time_ms": self.wall_time_ms,
            "lower": self.lower,
            "upper": self.upper,
            "ci_low": ci_low,
            "ci_high": ci_high,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SweepRow":
        return cls(
            n=data["n"],
            c=as_fraction(data["c"]),
            p=data["p"],
            trials=data["trials"],
            found=data["found"],
            certified_no=data["certified_no"],
            unknown=data["unknown"],
            mean_coverage=data["mean_coverage"],
            wall_time_ms=data["wall_time_ms"],
        )


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...] = ()
    metadata: dict = field(default_factory=dict)
    outcomes: tuple[TrialOutcome, ...] = ()

    def row(self, n: int, c) -> SweepRow:
        c = as_fraction(c)
        for row in self.rows:
            if row.n == n and row.c == c:
                return row
        raise LabError(f"No hay fila para n={n}, c={format_fraction(c)}")

    def first_c_reaching(self, n: int, rate=REACH_RATE) -> Fraction | None:
        """Menor c del grid con found/trials ≥ rate, o ``None``."""
        rate = as_fraction(rate)
        for row in self.rows:
            if row.n == n and Fraction(row.found, row.trials) >= rate:
                return row.c
        return None

    def monotonicity_violations(self) -> list[tuple[int, int, int]]:
        """(n, trial, índice de c) donde un Found deja de serlo al crecer c."""
        violations = []
        for outcome in self.outcomes:
            seen_found = False
            for i, status in enumerate(outcome.statuses):
                if status == TilingStatus.FOUND:
                    seen_found = True
                elif seen_found:
                    violations.append((outcome.n, outcome.trial, i))
        return violations

    def as_dict(self) -> dict:
        return {
            "metadata": self.metadata,
            "rows": [row.as_dict() for row in self.rows],
            "trial_outcomes": [o.as_dict() for o in self.outcomes],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SweepResult":
        return cls(
            rows=tuple(SweepRow.from_dict(r) for r in data.get("rows", [])),
            metadata=dict(data.get("metadata", {})),
            outcomes=tuple(TrialOutcome.from_dict(o) for o in data.get("trial_outcomes", [])),
        )


@dataclass(frozen=True)
class ExtremalDemoResult:
    result: SweepResult
    verdict: dict

    def as_dict(self) -> dict:
        return {**self.result.as_dict(), "verdict": self.verdict}


@dataclass(frozen=True)
class BaseComparisonResult:
    empty: SweepResult
    dense: SweepResult
    alpha: Fraction
    n: int

    def dominance_violations(self) -> list[tuple[int, int]]:
        """(trial, índice de c) con Found en base vacía pero no en la base densa."""
        dense = {(o.n, o.trial): o for o in self.dense.outcomes}
        violations = []
        for outcome in self.empty.outcomes:
            other = dense[(outcome.n, outcome.trial)]
            for i, status in enumerate(outcome.statuses):
                if status == TilingStatus.FOUND and other.statuses[i] != TilingStatus.FOUND:
                    violations.append((outcome.trial, i))
        return violations

    def as_dict(self) -> dict:
        side_by_side = []
        for empty_row, dense_row in zip(self.empty.rows, self.dense.rows):
            side_by_side.append({
                "n": empty_row.n,
                "c": format_fraction(empty_row.c),
                "p": empty_row.p,
                "empty": {"found": empty_row.found, "lower": empty_row.lower, "upper": empty_row.upper},
                "mindeg": {"found": dense_row.found, "lower": dense_row.lower, "upper": dense_row.upper},
            })
        reach = {
            "empty": self.empty.first_c_reaching(self.n),
            "mindeg": self.dense.first_c_reaching(self.n),
        }
        return {
            "alpha": format_fraction(self.alpha),
            "note": LOG_FACTOR_NOTE,
            "rows": side_by_side,
            "first_c_reaching_4_5": {k: format_fraction(v) if v is not None else None for k, v in reach.items()},
            "dominance_violations": len(self.dominance_violations()),
            "empty": self.empty.as_dict(),
            "mindeg": self.dense.as_dict(),
        }


# --- Ensayos ---

@dataclass(frozen=True)
class TrialTask:
    n: int
    trial: int
    pattern: Pattern
    bases: tuple[BaseDescriptor, ...]
    c_grid: tuple[Fraction, ...]
    seed: int
    budget: int
    coupled: bool = True
    measure_y: bool = False


def _reuse(certificates, host, pattern) -> Tiling | None:
    for tiling in certificates:
        if tiling is not None and is_valid_tiling(tiling, host, pattern, perfect=True):
            return tiling.with_host(host)
    return None


def _solve(host, pattern, budget, seed, certificates) -> tuple[str, Tiling | None, int]:
    """Voraz primero (certificados Found baratos) y búsqueda exacta solo si falla."""
    carried = _reuse(certificates, host, pattern)
    if carried is not None:
        return TilingStatus.FOUND, carried, host.n
    if host.n % pattern.order:
        return TilingStatus.NONE_EXISTS, None, 0

    index = CopyIndex(host, pattern)
    greedy = max_tiling_greedy(host, pattern, seed, index=index)
    if greedy.coverage == host.n:
        return TilingStatus.FOUND, greedy, host.n
    result = perfect_tiling(host, pattern, budget, index=index)
    if result.found:
        return TilingStatus.FOUND, result.tiling, host.n
    return result.status, None, greedy.coverage


def _y_coverage(host, y_class, pattern, budget, target: Fraction) -> int:
    """Mejor cobertura de un H-tiling dentro de Y; exacta solo si el voraz no alcanza ``target``."""
    sub, _ = induced(host, y_class)
    index = CopyIndex(sub, pattern)
    greedy = max_tiling_greedy(sub, pattern, Seed(0), passes=4, index=index).coverage
    if greedy >= target or len(index) == 0:
        return greedy
    return max(greedy, max_tiling_exact(sub, pattern, budget, index=index).tiling.coverage)


def _run_trial(task: TrialTask) -> list[TrialOutcome]:
    n, pattern = task.n, task.pattern
    seed = Seed(task.seed).derive(n, task.trial)
    d_star = pattern.profile.d_star
    shared = pair_uniforms(n, seed.derive("random"))
    probabilities = [perturbed_probability(d_star, n, c) for c in task.c_grid]

    outcomes = []
    earlier: list[tuple] = []
    for base_desc in task.bases:
        base = base_desc.build(n, seed.derive("base"), pattern)
        inherited = [None] * len(task.c_grid)
        for other_base, tilings in earlier:
            if other_base.edges <= base.edges:
                inherited = [mine or theirs for mine, theirs in zip(inherited, tilings)]

        y_class = target = None
        if task.measure_y and base_desc.kind == "extremal":
            extremal = make_extremal_base(n, base_desc.value, pattern)
            y_class, target = extremal.y_class, extremal.eps * n

        statuses, coverages, wall_ms, y_coverages, tilings = [], [], [], [], []
        previous = None
        for i, p in enumerate(probabilities):
            uniforms = shared if task.coupled else pair_uniforms(n, seed.derive("random", i))
            host = union(base, graph_from_uniforms(n, uniforms, p))
            start = time.perf_counter()
            certificates = [inherited[i], previous if task.coupled else None]
            status, tiling, covered = _solve(host, pattern, task.budget, seed.derive("greedy", i), certificates)
            wall_ms.append(round((time.perf_counter() - start) * 1000, 3))
            if y_class is not None:
                y_coverages.append(_y_coverage(host, y_class, pattern, task.budget, target))
            statuses.append(str(status))
            coverages.append(covered / n)
            tilings.append(tiling)
            previous = tiling or previous
        earlier.append((base, tilings))
        outcomes.append(TrialOutcome(
            n, task.trial, str(base_desc), tuple(statuses), tuple(coverages), tuple(wall_ms), tuple(y_coverages)
        ))
    return outcomes


def _execute(tasks: list[TrialTask], workers: int, progress: bool, desc: str) -> list[list[TrialOutcome]]:
    """Ejecuta en serie o en procesos; ``map`` conserva el orden de las tareas."""
    bar = tqdm(total=len(tasks), desc=desc, disable=not progress)
    try:
        if workers <= 1:
            results = []
            for task in tasks:
                results.append(_run_trial(task))
                bar.update(1)
            return results
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = []
            for outcome in pool.map(_run_trial, tasks, chunksize=max(1, len(tasks) // (4 * workers))):
                results.append(outcome)
                bar.update(1)
            return results
    finally:
        bar.close()


def _tabulate(outcomes: list[TrialOutcome], n_values, c_grid, pattern: Pattern) -> tuple[SweepRow, ...]:
    rows = []
    d_star = pattern.profile.d_star
    for n in n_values:
        mine = [o for o in outcomes if o.n == n]
        for i, c in enumerate(c_grid):
            statuses = [o.statuses[i] for o in mine]
            row = SweepRow(
                n=n,
                c=c,
                p=perturbed_probability(d_star, n, c),
                trials=len(mine),
                found=statuses.count(TilingStatus.FOUND),
                certified_no=statuses.count(TilingStatus.NONE_EXISTS),
                unknown=statuses.count(TilingStatus.UNKNOWN),
                mean_coverage=sum(o.coverages[i] for o in mine) / len(mine),
                wall_time_ms=round(sum(o.wall_ms[i] for o in mine), 3),
            )
            logger.info(
                f"n={n} c={format_fraction(c)} p={row.p:.4g}: found={row.found} "
                f"no={row.certified_no} unknown={row.unknown} de {row.trials}"
            )
            rows.append(row)
    return tuple(rows)


def _versions() -> dict:
    return {
        "python": platform.python_version(),
        "django": django.get_version(),
        "numpy": numpy.__version__,
        "networkx": networkx.__version__,
        "scipy": scipy.__version__,
    }


def _metadata(kind: str, pattern_spec: str, base: str, seed: int, budget: int, coupled: bool) -> dict:
    return {
        "kind": kind,
        "pattern": pattern_spec,
        "base": base,
        "seed": seed,
        "budget": budget,
        "coupled": coupled,
        "versions": _versions(),
    }


def _sweep(
    pattern: Pattern,
    n_values,
    bases: tuple[BaseDescriptor, ...],
    c_grid,
    trials: int,
    seed: int,
    budget: int,
    coupled: bool = True,
    workers: int = 1,
    measure_y: bool = False,
    progress: bool = False,
) -> list[list[TrialOutcome]]:
    tasks = [
        TrialTask(n, t, pattern, bases, tuple(c_grid), seed, budget, coupled, measure_y)
        for n in n_values
        for t in range(trials)
    ]
    return _execute(tasks, workers, progress, desc=f"{pattern} × {', '.join(str(b) for b in bases)}")


# --- Operaciones públicas ---

def run_threshold_sweep(cfg: "SweepConfig", progress: bool = False) -> SweepResult:
    """Una fila por (n, c) con el recuento Found / NoneExists / Unknown."""
    logger.info(f"Barrido {cfg.pattern_spec} base={cfg.base} n={list(cfg.n_values)} trials={cfg.trials} seed={cfg.seed}")
    per_trial = _sweep(
        cfg.pattern, cfg.n_values, (cfg.base,), cfg.c_grid, cfg.trials,
        cfg.seed, cfg.budget, cfg.coupled, cfg.workers, progress=progress,
    )
    outcomes = [trial[0] for trial in per_trial]
    metadata = _metadata(RunKind.SWEEP, cfg.pattern_spec, str(cfg.base), cfg.seed, cfg.budget, cfg.coupled)
    metadata["config"] = cfg.as_dict()
    result = SweepResult(_tabulate(outcomes, cfg.n_values, cfg.c_grid, cfg.pattern), metadata, tuple(outcomes))
    logger.info(f"✅ Barrido completado: {len(result.rows)} filas")
    return result


def run_extremal_demo(
    pattern: Pattern,
    n: int,
    a,
    c_grid,
    trials: int,
    seed: int,
    budget: int,
    pattern_spec: str = "",
    workers: int = 1,
    progress: bool = False,
) -> ExtremalDemoResult:
    """
    Barrido sobre la base bipartita completa extremal que, además, mide en cada
    ensayo la mejor cobertura de un H-tiling dentro de la clase Y y la compara
    con ε·n, ε = b − a(|H|−1).
    """
    extremal = make_extremal_base(n, a, pattern)
    base = BaseDescriptor("extremal", value=extremal.a)
    c_grid = tuple(as_fraction(c) for c in c_grid)
    per_trial = _sweep(pattern, [n], (base,), c_grid, trials, seed, budget, True, workers, True, progress)
    outcomes = [trial[0] for trial in per_trial]

    target = extremal.eps * n
    per_c = []
    for i, c in enumerate(c_grid):
        coverages = [o.y_coverages[i] for o in outcomes]
        per_c.append({
            "c": format_fraction(c),
            "mean_y_coverage": sum(coverages) / len(coverages),
            "y_covers_eps_n_rate": sum(1 for v in coverages if v >= target) / len(coverages),
        })
    verdict = {
        "a": format_fraction(extremal.a),
        "b": format_fraction(extremal.b),
        "eps": format_fraction(extremal.eps),
        "eps_n": format_fraction(target),
        "x_size": len(extremal.x_class),
        "y_size": len(extremal.y_class),
        "per_c": per_c,
    }
    metadata = _metadata(RunKind.EXTREMAL_DEMO, pattern_spec or str(pattern), str(base), seed, budget, True)
    result = SweepResult(_tabulate(outcomes, [n], c_grid, pattern), metadata, tuple(outcomes))
    logger.info(f"✅ Demostración extremal: a={verdict['a']}, ε={verdict['eps']}")
    return ExtremalDemoResult(result, verdict)


def run_base_comparison(
    pattern: Pattern,
    n: int,
    alpha,
    c_grid,
    trials: int,
    seed: int,
    budget: int,
    pattern_spec: str = "",
    workers: int = 1,
    progress: bool = False,
) -> BaseComparisonResult:
    """
    Mismo grid contra la base vacía y la base de grado mínimo α, con las mismas
    semillas y las mismas aristas aleatorias en cada ensayo.
    """
    alpha = as_fraction(alpha)
    bases = (BaseDescriptor("empty"), BaseDescriptor("mindeg", value=alpha))
    c_grid = tuple(as_fraction(c) for c in c_grid)
    per_trial = _sweep(pattern, [n], bases, c_grid, trials, seed, budget, True, workers, progress=progress)

    results = []
    for index, base in enumerate(bases):
        outcomes = [trial[index] for trial in per_trial]
        metadata = _metadata(RunKind.BASE_COMPARISON, pattern_spec or str(pattern), str(base), seed, budget, True)
        results.append(SweepResult(_tabulate(outcomes, [n], c_grid, pattern), metadata, tuple(outcomes)))

    comparison = BaseComparisonResult(results[0], results[1], alpha, n)
    violations = comparison.dominance_violations()
    if violations:
        logger.warning(f"⚠️ {len(violations)} violaciones de dominancia del acoplamiento")
    return comparison
