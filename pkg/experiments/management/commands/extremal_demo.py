import json

from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from experiments.exporters import emit
from experiments.harness import RunKind
from experiments.views import execute_run, save_run
from graphs.exceptions import LabError


class Command(BaseCommand):
    help = "Base bipartita completa extremal: ¿cuándo aparece el tiling perfecto y cuánto cubre Y?"

    def add_arguments(self, parser):
        parser.add_argument("--pattern", default="k3")
        parser.add_argument("--n", type=int, required=True)
        parser.add_argument("--a", required=True, help="fracción de la clase X, p. ej. 1/4")
        parser.add_argument("--c-grid", default=None, help="lista separada por comas, p. ej. 0,1/2,2,8")
        parser.add_argument("--trials", type=int, default=50)
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument("--budget", type=int, default=None)
        parser.add_argument("--csv", default=None, help="además escribe las filas en CSV")
        parser.add_argument("--save", action="store_true")
        parser.add_argument("--no-progress", action="store_true")

    def handle(self, *args, **opts):
        payload = {"pattern": opts["pattern"], "n": opts["n"], "a": opts["a"], "trials": opts["trials"]}
        if opts["c_grid"]:
            payload["c_grid"] = [c.strip() for c in opts["c_grid"].split(",") if c.strip()]
        for key in ("seed", "budget"):
            if opts[key] is not None:
                payload[key] = opts[key]
        try:
            demo = execute_run(RunKind.EXTREMAL_DEMO, payload, progress=not opts["no_progress"])
            if opts["csv"]:
                emit(demo.result, "csv", opts["csv"])
        except serializers.ValidationError as e:
            raise CommandError(f"Parámetros inválidos: {json.dumps(e.detail, ensure_ascii=False)}")
        except (LabError, OSError) as e:
            raise CommandError(str(e))

        if opts["save"]:
            run = save_run(RunKind.EXTREMAL_DEMO, payload, demo)
            self.stderr.write(self.style.SUCCESS(f"✅ Guardado como SweepRun #{run.pk}"))
        self.stdout.write(json.dumps(demo.as_dict(), indent=2, ensure_ascii=False))
