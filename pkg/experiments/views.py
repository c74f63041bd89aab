import logging

from django.utils import timezone
from rest_framework import mixins, status, viewsets
from rest_framework.response import Response

from graphs.exceptions import LabError

from .harness import RunKind, run_base_comparison, run_extremal_demo, run_threshold_sweep
from .models import SweepRun
from .serializers import SweepRunSerializer, validated_config

logger = logging.getLogger(__name__)


def execute_run(kind: str, payload: dict, progress: bool = False):
    """
    Valida ``payload`` según ``kind`` y ejecuta el experimento. Devuelve el
    objeto de resultado (``SweepResult``, ``ExtremalDemoResult`` o
    ``BaseComparisonResult``); todos exponen ``as_dict()``.
    """
    checker = validated_config(kind, payload)
    if kind == RunKind.SWEEP:
        return run_threshold_sweep(checker.to_config(), progress=progress)

    data = checker.validated_data
    defaults = checker.defaults(data)
    common = {
        "pattern": data["pattern_obj"],
        "n": data["n"],
        "c_grid": data["c_grid"],
        "trials": data["trials"],
        "pattern_spec": data["pattern"],
        "progress": progress,
        **defaults,
    }
    if kind == RunKind.EXTREMAL_DEMO:
        return run_extremal_demo(a=data["a"], **common)
    return run_base_comparison(alpha=data["alpha"], **common)


def save_run(kind: str, payload: dict, result=None, error: str = "") -> SweepRun:
    run = SweepRun(kind=kind, config=payload)
    run.status = "FAILED" if error else "COMPLETED"
    run.result = result.as_dict() if result is not None else {}
    run.error = error
    run.finished_at = timezone.now()
    run.save()
    return run


class SweepRunViewSet(
    mixins.CreateModelMixin,
    mixins.ListModelMixin,
    mixins.RetrieveModelMixin,
    mixins.DestroyModelMixin,
    viewsets.GenericViewSet,
):
    """Las ejecuciones se crean y se ejecutan en la misma petición."""

    queryset = SweepRun.objects.all()
    serializer_class = SweepRunSerializer

    def create(self, request, *args, **kwargs):
        serializer = self.get_serializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        run = serializer.save(status="RUNNING")
        try:
            result = execute_run(run.kind, run.config)
        except LabError as e:
            run.status = "FAILED"
            run.error = str(e)
            run.finished_at = timezone.now()
            run.save()
            logger.warning(f"⚠️ Ejecución {run.pk} fallida: {e}")
            return Response({"error": str(e), "id": run.pk}, status=status.HTTP_400_BAD_REQUEST)

        run.status = "COMPLETED"
        run.result = result.as_dict()
        run.finished_at = timezone.now()
        run.save()
        logger.info(f"✅ Ejecución {run.pk} ({run.kind}) completada")
        return Response(self.get_serializer(run).data, status=status.HTTP_201_CREATED)
