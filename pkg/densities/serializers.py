from rest_framework import serializers

from graphs.serializers import GraphField, RationalField


class ClassifyRequestSerializer(serializers.Serializer):
    graph = GraphField(required=False)
    pattern = serializers.CharField(required=False)
    n = serializers.IntegerField(min_value=3, required=False)
    c = RationalField(required=False, default="1")

    def validate(self, attrs):
        if "graph" not in attrs and "pattern" not in attrs:
            raise serializers.ValidationError("Envía 'graph' (texto o id) o 'pattern' (nombre)")
        return attrs
