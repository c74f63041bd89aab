"""
Propiedades F_H, F'_H y F_H evitando copias prohibidas.

- F_H(η): todo subconjunto de ⌈ηn⌉ vértices contiene una copia de H.
- F'_H(η): para todo par disjunto (A, B) con |A|, |B| ≥ ⌈ηn⌉ hay una copia
  de H con un vértice en A y |H|−1 en B.
- F_H evitando 𝓗: como F_H pero la copia no puede estar en la lista.

Basta con mirar los conjuntos de tamaño mínimo: un superconjunto hereda la
copia. El modo exacto recorre todos (con tope); el muestreado sólo puede
refutar, y su contraejemplo se verifica de nuevo enumerando copias.
"""

import logging
import math
from dataclasses import dataclass
from itertools import combinations

from django.db import models

from densities.invariants import Pattern
from graphs.exceptions import EnumerationCapError, LabError
from graphs.random_models import as_seed
from graphs.structures import Graph
from graphs.utils import as_fraction, format_fraction, lab_setting, mask_of, popcount
from tilings.copies import CopyIndex, copy_key, enumerate_copies

logger = logging.getLogger(__name__)

DEFAULT_SUBSET_CAP = 200_000
DEFAULT_TRIALS = 1000


class PropertyMode(models.TextChoices):
    EXACT = "exact", "Exact"
    SAMPLED = "sampled", "Sampled"


@dataclass(frozen=True)
class PropertyReport:
    holds: bool
    mode: str
    threshold: int
    checked: int
    witness: tuple | None = None

    def __bool__(self):
        return self.holds

    @property
    def one_sided(self) -> bool:
        """En modo muestreado un ``True`` sólo significa "sin contraejemplo"."""
        return self.mode == PropertyMode.SAMPLED and self.holds

    def as_dict(self) -> dict:
        witness = None
        if self.witness is not None:
            witness = [sorted(part) for part in self.witness]
        return {
            "holds": self.holds,
            "mode": str(self.mode),
            "one_sided": self.one_sided,
            "threshold": self.threshold,
            "checked": self.checked,
            "witness": witness,
        }


def _check_fraction(value, name: str):
    value = as_fraction(value)
    if not (0 < value <= 1):
        raise LabError(f"{name} debe estar en (0, 1] (recibido {format_fraction(value)})")
    return value


def _check_mode(mode: str):
    if mode not in PropertyMode.values:
        raise LabError(f"Modo desconocido '{mode}' (usa exact|sampled)")


def _subset_cap(cap) -> int:
    return cap if cap is not None else lab_setting("LAB_SUBSET_ENUMERATION_CAP", DEFAULT_SUBSET_CAP)


def _random_subset(rng, pool: list[int], size: int) -> tuple[int, ...]:
    return tuple(sorted(rng.choice(pool, size=size, replace=False).tolist()))


def _has_allowed_copy(g: Graph, h: Pattern, subset, forbidden: frozenset) -> bool:
    return any(copy.key not in forbidden for copy in enumerate_copies(g, h, within=subset))


def _subsets_property(g: Graph, h: Pattern, size: int, forbidden: frozenset, mode, trials, seed, cap) -> PropertyReport:
    """Núcleo común de F_H y su versión con copias prohibidas."""
    if size > g.n:
        return PropertyReport(True, mode, size, 0)
    index = CopyIndex(g, h)
    masks = [m for m, c in zip(index.masks, index.copies) if c.key not in forbidden]

    def empty_of_copies(subset_mask: int) -> bool:
        return not any(m & ~subset_mask == 0 for m in masks)

    if mode == PropertyMode.EXACT:
        count = math.comb(g.n, size)
        if count > _subset_cap(cap):
            raise EnumerationCapError(count, _subset_cap(cap))
        for checked, subset in enumerate(combinations(range(g.n), size), start=1):
            if empty_of_copies(mask_of(subset)):
                return _verified(g, h, subset, forbidden, mode, size, checked)
        return PropertyReport(True, mode, size, count)

    rng = as_seed(seed).generator()
    pool = list(range(g.n))
    for checked in range(1, trials + 1):
        subset = _random_subset(rng, pool, size)
        if empty_of_copies(mask_of(subset)):
            return _verified(g, h, subset, forbidden, mode, size, checked)
    return PropertyReport(True, mode, size, trials)


def _verified(g, h, subset, forbidden, mode, size, checked) -> PropertyReport:
    if _has_allowed_copy(g, h, subset, forbidden):
        raise LabError(f"El contraejemplo {list(subset)} contiene una copia permitida")
    return PropertyReport(False, mode, size, checked, witness=(frozenset(subset),))


def check_F_H(g: Graph, h: Pattern, eta, mode: str = PropertyMode.EXACT, trials: int = DEFAULT_TRIALS, seed=0, cap=None) -> PropertyReport:
    """¿Todo conjunto de ⌈ηn⌉ vértices contiene una copia de H?"""
    eta = _check_fraction(eta, "eta")
    _check_mode(mode)
    return _subsets_property(g, h, math.ceil(eta * g.n), frozenset(), mode, trials, seed, cap)


def check_F_H_avoiding(
    g: Graph,
    h: Pattern,
    gamma2,
    forbidden,
    mode: str = PropertyMode.EXACT,
    trials: int = DEFAULT_TRIALS,
    seed=0,
    cap=None,
) -> PropertyReport:
    """
    Como F_H, pero cada copia encontrada debe quedar fuera de ``forbidden``
    (copias identificadas por su conjunto de vértices y de aristas).
    """
    gamma2 = _check_fraction(gamma2, "gamma2")
    _check_mode(mode)
    forbidden_keys = frozenset(copy_key(item) for item in forbidden)
    return _subsets_property(g, h, math.ceil(gamma2 * g.n), forbidden_keys, mode, trials, seed, cap)


def _spans_pair(mask: int, a_mask: int, b_mask: int, rest: int) -> bool:
    return popcount(mask & a_mask) == 1 and popcount(mask & b_mask) == rest


def check_F_H_prime(g: Graph, h: Pattern, eta, mode: str = PropertyMode.EXACT, trials: int = DEFAULT_TRIALS, seed=0, cap=None) -> PropertyReport:
    """¿Todo par disjunto (A, B) de tamaños ≥ ⌈ηn⌉ tiene una copia con un vértice en A y |H|−1 en B?"""
    eta = _check_fraction(eta, "eta")
    _check_mode(mode)
    size = math.ceil(eta * g.n)
    if 2 * size > g.n:
        return PropertyReport(True, mode, size, 0)
    masks = CopyIndex(g, h).masks
    rest = h.order - 1

    def spanned(a, b) -> bool:
        a_mask, b_mask = mask_of(a), mask_of(b)
        return any(_spans_pair(m, a_mask, b_mask, rest) for m in masks)

    def verified(a, b, checked) -> PropertyReport:
        a_mask, b_mask = mask_of(a), mask_of(b)
        for copy in enumerate_copies(g, h, within=a + b):
            if _spans_pair(mask_of(copy.image), a_mask, b_mask, rest):
                raise LabError(f"El contraejemplo ({list(a)}, {list(b)}) tiene una copia que lo cruza")
        return PropertyReport(False, mode, size, checked, witness=(frozenset(a), frozenset(b)))

    if mode == PropertyMode.EXACT:
        count = math.comb(g.n, size) * math.comb(g.n - size, size)
        if count > _subset_cap(cap):
            raise EnumerationCapError(count, _subset_cap(cap))
        checked = 0
        for a in combinations(range(g.n), size):
            remaining = [v for v in range(g.n) if v not in a]
            for b in combinations(remaining, size):
                checked += 1
                if not spanned(a, b):
                    return verified(a, b, checked)
        return PropertyReport(True, mode, size, checked)

    rng = as_seed(seed).generator()
    pool = list(range(g.n))
    for checked in range(1, trials + 1):
        both = rng.choice(pool, size=2 * size, replace=False).tolist()
        a, b = tuple(sorted(both[:size])), tuple(sorted(both[size:]))
        if not spanned(a, b):
            return verified(a, b, checked)
    return PropertyReport(True, mode, size, trials)
