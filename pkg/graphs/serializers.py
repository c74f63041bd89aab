from rest_framework import serializers

from .exceptions import LabError
from .formats import parse_graph, serialize_edge_list
from .models import GraphRecord
from .random_models import SEED_MAX, parse_base_descriptor
from .utils import as_fraction


class GraphField(serializers.Field):
    """
    Acepta un grafo como texto (lista de aristas o graph6) o como id de un
    ``GraphRecord`` guardado. Devuelve un ``Graph`` inmutable.
    """

    default_error_messages = {
        "invalid": "Grafo inválido: {detail}",
        "missing": "No existe un grafo guardado con id {pk}",
    }

    def to_internal_value(self, data):
        if isinstance(data, int) or (isinstance(data, str) and data.strip().isdigit() and "\n" not in data.strip()):
            pk = int(data)
            record = GraphRecord.objects.filter(pk=pk).first()
            if record is None:
                self.fail("missing", pk=pk)
            return record.to_graph()
        if not isinstance(data, str):
            self.fail("invalid", detail="se esperaba texto o id")
        try:
            return parse_graph(data)
        except LabError as e:
            self.fail("invalid", detail=str(e))

    def to_representation(self, value):
        return serialize_edge_list(value)


class RationalField(serializers.Field):
    """Racional exacto a partir de '1/4', '0.25' o 0.25."""

    def to_internal_value(self, data):
        try:
            return as_fraction(data)
        except LabError as e:
            raise serializers.ValidationError(str(e))

    def to_representation(self, value):
        return str(value)


class GraphRecordSerializer(serializers.ModelSerializer):
    text = serializers.CharField(write_only=True, required=False)

    class Meta:
        model = GraphRecord
        fields = ["id", "name", "n", "edge_count", "graph6", "source", "seed", "parameters", "created_at", "text"]
        read_only_fields = ["n", "edge_count", "created_at"]
        extra_kwargs = {"graph6": {"required": False}}

    def validate(self, attrs):
        text = attrs.pop("text", None) or attrs.get("graph6")
        if not text:
            raise serializers.ValidationError("Envía 'text' (lista de aristas o graph6) o 'graph6'")
        try:
            graph = parse_graph(text)
        except LabError as e:
            raise serializers.ValidationError({"text": str(e)})
        attrs["graph"] = graph
        return attrs

    def create(self, validated_data):
        graph = validated_data.pop("graph")
        validated_data.pop("graph6", None)
        record = GraphRecord.from_graph(graph, **validated_data)
        record.save()
        return record


class SampleRequestSerializer(serializers.Serializer):
    n = serializers.IntegerField(min_value=0)
    p = serializers.FloatField(min_value=0.0, max_value=1.0)
    seed = serializers.IntegerField(min_value=0, max_value=SEED_MAX, required=False)
    base = serializers.CharField(required=False, default="empty")
    pattern = serializers.CharField(required=False, default="k3")
    name = serializers.CharField(required=False, allow_blank=True, default="")

    def validate_base(self, value):
        try:
            descriptor = parse_base_descriptor(value)
        except LabError as e:
            raise serializers.ValidationError(str(e))
        if descriptor.kind == "file":
            raise serializers.ValidationError("La API no lee archivos; sube el grafo base y usa la CLI")
        return descriptor
