import json

from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from experiments.exporters import emit, to_csv, to_json
from experiments.harness import RunKind
from experiments.views import execute_run, save_run
from graphs.exceptions import LabError


class Command(BaseCommand):
    help = "Barrido Monte Carlo del umbral de tiling perfecto en G ∪ G(n,p)"

    def add_arguments(self, parser):
        parser.add_argument("--config", required=True, help="JSON con pattern, n_values, base, c_grid, trials, seed, budget")
        parser.add_argument("--seed", type=int, default=None, help="sustituye la semilla del archivo")
        parser.add_argument("--workers", type=int, default=None)
        parser.add_argument("--format", choices=["csv", "json"], default="csv")
        parser.add_argument("--output", default=None, help="ruta de salida; sin ella se escribe en stdout")
        parser.add_argument("--save", action="store_true", help="guarda la ejecución como SweepRun")
        parser.add_argument("--no-progress", action="store_true")

    def handle(self, *args, **opts):
        try:
            with open(opts["config"], encoding="utf-8") as f:
                payload = json.load(f)
            for key in ("seed", "workers"):
                if opts[key] is not None:
                    payload[key] = opts[key]
            result = execute_run(RunKind.SWEEP, payload, progress=not opts["no_progress"])
            if opts["output"]:
                emit(result, opts["format"], opts["output"])
        except serializers.ValidationError as e:
            raise CommandError(f"Configuración inválida: {json.dumps(e.detail, ensure_ascii=False)}")
        except (LabError, OSError, json.JSONDecodeError) as e:
            raise CommandError(str(e))

        if opts["save"]:
            run = save_run(RunKind.SWEEP, payload, result)
            self.stderr.write(self.style.SUCCESS(f"✅ Guardado como SweepRun #{run.pk}"))
        if not opts["output"]:
            self.stdout.write(to_csv(result) if opts["format"] == "csv" else to_json(result), ending="")
        else:
            self.stderr.write(self.style.SUCCESS(f"✅ {len(result.rows)} filas escritas en {opts['output']}"))
