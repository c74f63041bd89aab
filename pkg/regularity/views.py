import logging

from django.conf import settings
from rest_framework import status
from rest_framework.response import Response
from rest_framework.views import APIView

from densities.invariants import parse_pattern
from graphs.exceptions import IrregularPairError, LabError

from .completion import PairCompletionParams, complete_pair_tiling
from .matching import hall_perfect_matching
from .pairs import check_eps_regular, check_super_regular, superregularize
from .serializers import (
    CheckRegularRequestSerializer,
    CompletePairRequestSerializer,
    PairRequestSerializer,
    StarTileRequestSerializer,
    SuperregularizeRequestSerializer,
)
from .stars import greedy_star_tiling

logger = logging.getLogger(__name__)


def regularity_report(host, a, b, eps, d=None, mode="auto", trials=2000, seed=None) -> dict:
    """ε-regularidad y, si se da ``d``, (ε,d)-super-regularidad. Salida común a CLI y API."""
    seed = settings.LAB_DEFAULT_SEED if seed is None else seed
    report = {"regularity": check_eps_regular(host, a, b, eps, mode, trials, seed).as_dict()}
    if d is not None:
        report["super_regularity"] = check_super_regular(host, a, b, eps, d, mode, trials, seed).as_dict()
    return report


def superregularize_report(host, a, b, eps, d, mode="auto", trials=2000, seed=None) -> dict:
    seed = settings.LAB_DEFAULT_SEED if seed is None else seed
    try:
        return {"status": "ok", **superregularize(host, a, b, eps, d, mode, trials, seed).as_dict()}
    except IrregularPairError as e:
        return {"status": "irregular", "error": str(e), "report": e.report.as_dict() if e.report else None}


def complete_pair_report(cross, random_layer, s, t, pattern, seed=None, **constants) -> dict:
    seed = settings.LAB_DEFAULT_SEED if seed is None else seed
    params = PairCompletionParams.from_settings(**constants)
    return complete_pair_tiling(cross, random_layer, s, t, pattern, params, seed).as_dict()


class LabAPIView(APIView):
    """Valida con ``serializer_class`` y traduce ``LabError`` a 400."""

    serializer_class = None

    def compute(self, data) -> dict:
        raise NotImplementedError

    def post(self, request):
        params = self.serializer_class(data=request.data)
        params.is_valid(raise_exception=True)
        try:
            report = self.compute(params.validated_data)
        except LabError as e:
            logger.warning(f"⚠️ {type(self).__name__} rechazada: {e}")
            return Response({"error": str(e)}, status=status.HTTP_400_BAD_REQUEST)
        return Response(report)


class CheckRegularView(LabAPIView):
    serializer_class = CheckRegularRequestSerializer

    def compute(self, data):
        return regularity_report(
            data["host"], data["side_a"], data["side_b"], data["eps"], data.get("d"),
            data["mode"], data["trials"], data.get("seed"),
        )


class SuperregularizeView(LabAPIView):
    serializer_class = SuperregularizeRequestSerializer

    def compute(self, data):
        return superregularize_report(
            data["host"], data["side_a"], data["side_b"], data["eps"], data["d"],
            data["mode"], data["trials"], data.get("seed"),
        )


class HallView(LabAPIView):
    serializer_class = PairRequestSerializer

    def compute(self, data):
        return hall_perfect_matching(data["host"], data["side_a"], data["side_b"]).as_dict()


class StarTileView(LabAPIView):
    serializer_class = StarTileRequestSerializer

    def compute(self, data):
        return greedy_star_tiling(data["host"], data["t"], data.get("eps")).as_dict()


class CompletePairView(LabAPIView):
    serializer_class = CompletePairRequestSerializer

    def compute(self, data):
        pattern = parse_pattern(data["pattern"])
        report = complete_pair_report(
            data["cross"], data["random_layer"], data["side_s"], data["side_t"], pattern, data.get("seed"),
            eps5=data.get("eps5"), phi=data.get("phi"), d1=data.get("d1"),
        )
        logger.info(f"✅ complete-pair {pattern}: {report['status']} por {report['route']}")
        return report
