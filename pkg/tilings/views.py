import logging

from django.conf import settings
from rest_framework import status
from rest_framework.response import Response
from rest_framework.views import APIView

from densities.invariants import parse_pattern
from graphs.exceptions import LabError

from .serializers import TileRequestSerializer
from .solver import max_tiling_exact, max_tiling_greedy, perfect_tiling

logger = logging.getLogger(__name__)


def tile_report(host, pattern, mode="perfect", budget=None, seed=None) -> dict:
    """Salida JSON común a la CLI y la API: {status, size, tiling, nodes_explored}."""
    if mode == "perfect":
        return perfect_tiling(host, pattern, budget).as_dict()
    if mode == "max":
        result = max_tiling_exact(host, pattern, budget)
        report = result.as_dict()
        report["status"] = "exact" if result.exact else "best_found"
        return report
    seed = settings.LAB_DEFAULT_SEED if seed is None else seed
    tiling = max_tiling_greedy(host, pattern, seed)
    return {
        "status": "greedy",
        "size": tiling.size,
        "coverage": tiling.coverage,
        "tiling": tiling.vertex_lists(),
        "nodes_explored": 0,
    }


class TileView(APIView):
    def post(self, request):
        params = TileRequestSerializer(data=request.data)
        params.is_valid(raise_exception=True)
        data = params.validated_data
        try:
            pattern = parse_pattern(data["pattern"])
            report = tile_report(data["host"], pattern, data["mode"], data.get("budget"), data.get("seed"))
        except LabError as e:
            return Response({"error": str(e)}, status=status.HTTP_400_BAD_REQUEST)
        logger.info(f"✅ tile {data['mode']} {pattern}: {report['status']}")
        return Response(report)
