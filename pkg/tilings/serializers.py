from rest_framework import serializers

from graphs.random_models import SEED_MAX
from graphs.serializers import GraphField

MODE_CHOICES = [
    ("perfect", "Perfect"),
    ("max", "Max (exact)"),
    ("greedy", "Greedy"),
]


class TileRequestSerializer(serializers.Serializer):
    host = GraphField()
    pattern = serializers.CharField(default="k3")
    mode = serializers.ChoiceField(choices=MODE_CHOICES, default="perfect")
    budget = serializers.IntegerField(min_value=1, required=False)
    seed = serializers.IntegerField(min_value=0, max_value=SEED_MAX, required=False)
