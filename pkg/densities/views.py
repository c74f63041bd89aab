import logging

from rest_framework import status
from rest_framework.response import Response
from rest_framework.views import APIView

from graphs.exceptions import LabError

from .invariants import Pattern, named_pattern, threshold_formulas
from .serializers import ClassifyRequestSerializer

logger = logging.getLogger(__name__)


def profile_report(graph, n=None, c=1) -> dict:
    """Perfil de densidad en JSON; añade las tres fórmulas de umbral si se da n."""
    pattern = Pattern.from_graph(graph, require_edge=False)
    report = pattern.profile.as_dict()
    report["canonical_edges"] = [list(e) for e in pattern.edge_list]
    if n is not None and graph.edge_count > 0:
        report["thresholds"] = threshold_formulas(graph, n, c)._asdict()
    return report


class ClassifyView(APIView):
    def post(self, request):
        params = ClassifyRequestSerializer(data=request.data)
        params.is_valid(raise_exception=True)
        data = params.validated_data
        try:
            graph = data["graph"] if "graph" in data else named_pattern(data["pattern"]).graph
            report = profile_report(graph, data.get("n"), data["c"])
        except LabError as e:
            return Response({"error": str(e)}, status=status.HTTP_400_BAD_REQUEST)
        return Response(report)
