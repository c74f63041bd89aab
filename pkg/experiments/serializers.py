from rest_framework import serializers

from .config import BaseComparisonSerializer, ExtremalDemoSerializer, SweepConfigSerializer
from .harness import RunKind
from .models import SweepRun

CONFIG_SERIALIZERS = {
    RunKind.SWEEP: SweepConfigSerializer,
    RunKind.EXTREMAL_DEMO: ExtremalDemoSerializer,
    RunKind.BASE_COMPARISON: BaseComparisonSerializer,
}


def validated_config(kind: str, payload: dict) -> serializers.Serializer:
    checker = CONFIG_SERIALIZERS[kind](data=payload)
    checker.is_valid(raise_exception=True)
    return checker


class SweepRunSerializer(serializers.ModelSerializer):
    class Meta:
        model = SweepRun
        fields = ["id", "kind", "status", "config", "result", "error", "created_at", "finished_at"]
        read_only_fields = ["status", "result", "error", "created_at", "finished_at"]

    def validate(self, attrs):
        kind = attrs.get("kind", "SWEEP")
        if not isinstance(attrs.get("config"), dict):
            raise serializers.ValidationError({"config": "Se esperaba un objeto JSON"})
        try:
            validated_config(kind, attrs["config"])
        except serializers.ValidationError as e:
            raise serializers.ValidationError({"config": e.detail})
        return attrs
