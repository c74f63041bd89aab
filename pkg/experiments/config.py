"""
Configuración de barridos: documentos JSON validados con serializers de DRF.

Los errores de validación salen como ``serializers.ValidationError`` antes
de ejecutar ningún ensayo.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from rest_framework import serializers

from densities.invariants import Pattern, parse_pattern
from graphs.exceptions import LabError
from graphs.random_models import SEED_MAX, BaseDescriptor, Seed, parse_base_descriptor
from graphs.serializers import RationalField
from graphs.utils import as_fraction, format_fraction, lab_setting

DEFAULT_C_GRID = ("1/4", "1/2", "1", "2", "4", "8")


@dataclass(frozen=True)
class SweepConfig:
    pattern_spec: str
    pattern: Pattern = field(repr=False, compare=False)
    n_values: tuple[int, ...]
    base: BaseDescriptor
    c_grid: tuple[Fraction, ...]
    trials: int
    seed: int
    budget: int
    coupled: bool = True
    workers: int = 1

    def as_dict(self) -> dict:
        return {
            "pattern": self.pattern_spec,
            "n_values": list(self.n_values),
            "base": str(self.base),
            "c_grid": [format_fraction(c) for c in self.c_grid],
            "trials": self.trials,
            "seed": self.seed,
            "budget": self.budget,
            "coupled": self.coupled,
            "workers": self.workers,
        }


def _pattern(value: str) -> Pattern:
    try:
        return parse_pattern(value)
    except (LabError, OSError) as e:
        raise serializers.ValidationError(str(e))


def _increasing_grid(values: list[Fraction]) -> list[Fraction]:
    if any(c < 0 for c in values):
        raise serializers.ValidationError("Los valores de c deben ser no negativos")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise serializers.ValidationError("c_grid debe ser estrictamente creciente")
    return values


class _RunSerializer(serializers.Serializer):
    """Campos comunes: patrón, rejilla de c, ensayos, semilla y presupuesto."""

    pattern = serializers.CharField(default="k3")
    c_grid = serializers.ListField(child=RationalField(), allow_empty=False, default=list(DEFAULT_C_GRID))
    trials = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField(min_value=0, max_value=SEED_MAX, required=False)
    budget = serializers.IntegerField(min_value=1, required=False)

    def validate_c_grid(self, value):
        return _increasing_grid([as_fraction(c) for c in value])

    def _divisible(self, n: int, pattern: Pattern):
        if n < pattern.order or n % pattern.order:
            raise serializers.ValidationError({"n": f"n={n} debe ser múltiplo de |H| = {pattern.order}"})

    def defaults(self, attrs) -> dict:
        return {
            "seed": attrs.get("seed", lab_setting("LAB_DEFAULT_SEED", 20240101)),
            "budget": attrs.get("budget", lab_setting("LAB_NODE_BUDGET", 200_000)),
        }


class SweepConfigSerializer(_RunSerializer):
    n_values = serializers.ListField(child=serializers.IntegerField(min_value=1), allow_empty=False)
    base = serializers.CharField(default="empty")
    coupled = serializers.BooleanField(default=True)
    workers = serializers.IntegerField(min_value=1, required=False)

    def validate_base(self, value):
        try:
            return parse_base_descriptor(value)
        except LabError as e:
            raise serializers.ValidationError(str(e))

    def validate(self, attrs):
        pattern = _pattern(attrs["pattern"])
        for n in attrs["n_values"]:
            self._divisible(n, pattern)
            try:
                attrs["base"].build(n, Seed(0), pattern)
            except (LabError, OSError) as e:
                raise serializers.ValidationError({"base": f"n={n}: {e}"})
        attrs["pattern_obj"] = pattern
        return attrs

    def to_config(self) -> SweepConfig:
        data = self.validated_data
        return SweepConfig(
            pattern_spec=data["pattern"],
            pattern=data["pattern_obj"],
            n_values=tuple(data["n_values"]),
            base=data["base"],
            c_grid=tuple(data["c_grid"]),
            trials=data["trials"],
            coupled=data["coupled"],
            workers=data.get("workers", lab_setting("LAB_SWEEP_WORKERS", 1)),
            **self.defaults(data),
        )


class ExtremalDemoSerializer(_RunSerializer):
    n = serializers.IntegerField(min_value=1)
    a = RationalField()

    def validate(self, attrs):
        pattern = _pattern(attrs["pattern"])
        self._divisible(attrs["n"], pattern)
        attrs["base"] = BaseDescriptor("extremal", value=attrs["a"])
        try:
            attrs["base"].build(attrs["n"], Seed(0), pattern)
        except LabError as e:
            raise serializers.ValidationError({"a": str(e)})
        attrs["pattern_obj"] = pattern
        return attrs


class BaseComparisonSerializer(_RunSerializer):
    n = serializers.IntegerField(min_value=1)
    alpha = RationalField()

    def validate(self, attrs):
        pattern = _pattern(attrs["pattern"])
        self._divisible(attrs["n"], pattern)
        try:
            BaseDescriptor("mindeg", value=attrs["alpha"]).build(attrs["n"], Seed(0))
        except LabError as e:
            raise serializers.ValidationError({"alpha": str(e)})
        attrs["pattern_obj"] = pattern
        return attrs


def load_sweep_config(source, **overrides) -> SweepConfig:
    """
    ``source`` es una ruta a un JSON o un dict ya leído; ``overrides`` con
    valor distinto de ``None`` sustituyen campos (p. ej. ``seed`` desde la CLI).
    """
    if isinstance(source, (str, Path)):
        data = json.loads(Path(source).read_text(encoding="utf-8"))
    else:
        data = dict(source)
    data.update({k: v for k, v in overrides.items() if v is not None})
    serializer = SweepConfigSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.to_config()
