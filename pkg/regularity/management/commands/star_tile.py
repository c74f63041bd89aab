import json

from django.core.management.base import BaseCommand, CommandError

from graphs.exceptions import LabError
from graphs.formats import read_graph
from regularity.stars import greedy_star_tiling


class Command(BaseCommand):
    help = "Tiling voraz con estrellas K_{1,t} y número de vértices sin cubrir"

    def add_arguments(self, parser):
        parser.add_argument("--host", required=True)
        parser.add_argument("--t", type=int, required=True)
        parser.add_argument("--eps", default=None, help="fracción tolerada sin cubrir (0.1 por defecto)")

    def handle(self, *args, **opts):
        try:
            result = greedy_star_tiling(read_graph(opts["host"]), opts["t"], opts["eps"])
        except (LabError, OSError) as e:
            raise CommandError(str(e))
        self.stdout.write(json.dumps(result.as_dict(), indent=2, ensure_ascii=False))
        if not result.within_guarantee:
            self.stderr.write(self.style.WARNING(f"⚠️ {len(result.uncovered)} vértices sin cubrir superan ε·n"))
