import json

from django.core.management.base import BaseCommand, CommandError

from densities.invariants import parse_pattern
from graphs.exceptions import LabError
from graphs.formats import read_graph
from tilings.views import tile_report


class Command(BaseCommand):
    help = "Busca un H-tiling perfecto, máximo o voraz en un grafo anfitrión"

    def add_arguments(self, parser):
        parser.add_argument("--host", required=True, help="archivo con lista de aristas o graph6")
        parser.add_argument("--pattern", default="k3", help="k2|k3|k4|c4|... o file:PATH")
        parser.add_argument("--mode", choices=["perfect", "max", "greedy"], default="perfect")
        parser.add_argument("--budget", type=int, default=None, help="límite de nodos de búsqueda")
        parser.add_argument("--seed", type=int, default=None)

    def handle(self, *args, **opts):
        try:
            host = read_graph(opts["host"])
            pattern = parse_pattern(opts["pattern"])
            report = tile_report(host, pattern, opts["mode"], opts["budget"], opts["seed"])
        except (LabError, OSError) as e:
            raise CommandError(str(e))
        self.stdout.write(json.dumps(report, indent=2))
