import json

from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from experiments.harness import LOG_FACTOR_NOTE, RunKind
from experiments.views import execute_run, save_run
from graphs.exceptions import LabError


class Command(BaseCommand):
    help = "Compara base vacía y base de grado mínimo α con las mismas aristas aleatorias"

    def add_arguments(self, parser):
        parser.add_argument("--pattern", default="k3")
        parser.add_argument("--n", type=int, required=True)
        parser.add_argument("--alpha", required=True, help="grado mínimo relativo, p. ej. 1/4")
        parser.add_argument("--c-grid", default=None)
        parser.add_argument("--trials", type=int, default=50)
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument("--budget", type=int, default=None)
        parser.add_argument("--save", action="store_true")
        parser.add_argument("--no-progress", action="store_true")

    def handle(self, *args, **opts):
        payload = {"pattern": opts["pattern"], "n": opts["n"], "alpha": opts["alpha"], "trials": opts["trials"]}
        if opts["c_grid"]:
            payload["c_grid"] = [c.strip() for c in opts["c_grid"].split(",") if c.strip()]
        for key in ("seed", "budget"):
            if opts[key] is not None:
                payload[key] = opts[key]
        try:
            comparison = execute_run(RunKind.BASE_COMPARISON, payload, progress=not opts["no_progress"])
        except serializers.ValidationError as e:
            raise CommandError(f"Parámetros inválidos: {json.dumps(e.detail, ensure_ascii=False)}")
        except (LabError, OSError) as e:
            raise CommandError(str(e))

        violations = comparison.dominance_violations()
        if violations:
            self.stderr.write(self.style.WARNING(f"⚠️ {len(violations)} violaciones de dominancia"))
        if opts["save"]:
            run = save_run(RunKind.BASE_COMPARISON, payload, comparison)
            self.stderr.write(self.style.SUCCESS(f"✅ Guardado como SweepRun #{run.pk}"))
        self.stderr.write(self.style.WARNING(LOG_FACTOR_NOTE))
        self.stdout.write(json.dumps(comparison.as_dict(), indent=2, ensure_ascii=False))
