from rest_framework import serializers

from graphs.random_models import SEED_MAX
from graphs.serializers import GraphField, RationalField

from .pairs import CheckMode


def vertex_list(**kwargs):
    return serializers.ListField(child=serializers.IntegerField(min_value=0), **kwargs)


class PairRequestSerializer(serializers.Serializer):
    host = GraphField()
    side_a = vertex_list(allow_empty=False)
    side_b = vertex_list(allow_empty=False)

    def validate(self, attrs):
        if set(attrs["side_a"]) & set(attrs["side_b"]):
            raise serializers.ValidationError("side_a y side_b deben ser disjuntos")
        return attrs


class CheckRegularRequestSerializer(PairRequestSerializer):
    eps = RationalField()
    d = RationalField(required=False)
    mode = serializers.ChoiceField(choices=CheckMode.choices, default=CheckMode.AUTO)
    trials = serializers.IntegerField(min_value=1, default=2000)
    seed = serializers.IntegerField(min_value=0, max_value=SEED_MAX, required=False)


class SuperregularizeRequestSerializer(CheckRegularRequestSerializer):
    d = RationalField()


class StarTileRequestSerializer(serializers.Serializer):
    host = GraphField()
    t = serializers.IntegerField(min_value=1)
    eps = RationalField(required=False)


class CompletePairRequestSerializer(serializers.Serializer):
    cross = GraphField()
    random_layer = GraphField()
    side_s = vertex_list()
    side_t = vertex_list()
    pattern = serializers.CharField(default="k3")
    eps5 = RationalField(required=False)
    phi = RationalField(required=False)
    d1 = RationalField(required=False)
    seed = serializers.IntegerField(min_value=0, max_value=SEED_MAX, required=False)

    def validate(self, attrs):
        if attrs["cross"].n != attrs["random_layer"].n:
            raise serializers.ValidationError("cross y random_layer deben tener el mismo número de vértices")
        return attrs
