import logging

from django.conf import settings
from rest_framework import status, viewsets
from rest_framework.decorators import action
from rest_framework.response import Response

from densities.invariants import parse_pattern

from .exceptions import LabError
from .models import GraphRecord
from .random_models import PerturbedSpec, Seed, sample_perturbed
from .serializers import GraphRecordSerializer, SampleRequestSerializer

logger = logging.getLogger(__name__)


class GraphRecordViewSet(viewsets.ModelViewSet):
    queryset = GraphRecord.objects.all()
    serializer_class = GraphRecordSerializer

    @action(detail=False, methods=['post'])
    def sample(self, request):
        """Muestrea base ∪ G(n,p) con semilla y guarda el grafo perturbado."""
        params = SampleRequestSerializer(data=request.data)
        params.is_valid(raise_exception=True)
        data = params.validated_data
        seed = data.get("seed", settings.LAB_DEFAULT_SEED)
        base = data["base"]

        try:
            pattern = parse_pattern(data["pattern"]) if base.kind == "extremal" else None
            _, perturbed = sample_perturbed(PerturbedSpec(base, data["p"]), data["n"], Seed(seed), pattern)
        except LabError as e:
            logger.warning(f"⚠️ Muestreo rechazado: {e}")
            return Response({"error": str(e)}, status=status.HTTP_400_BAD_REQUEST)

        record = GraphRecord.from_graph(
            perturbed,
            name=data["name"],
            source=GraphRecord.source_for(base.kind, data["p"]),
            seed=str(seed),
            parameters={"p": data["p"], "base": str(base), "pattern": data["pattern"]},
        )
        record.save()
        logger.info(f"✅ Grafo muestreado n={record.n}, e={record.edge_count} (id={record.id})")
        return Response(GraphRecordSerializer(record).data, status=status.HTTP_201_CREATED)
