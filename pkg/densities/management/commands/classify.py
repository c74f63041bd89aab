import json
import sys

from django.core.management.base import BaseCommand, CommandError

from densities.invariants import parse_pattern
from densities.views import profile_report
from graphs.exceptions import LabError
from graphs.formats import parse_graph, read_graph


class Command(BaseCommand):
    help = "Calcula d, d*, d*(v), s_v, s y la clase de balance de un patrón H"

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument("--input", help="archivo con lista de aristas o graph6 ('-' para stdin)")
        source.add_argument("--graph6", help="cadena graph6")
        source.add_argument("--pattern", help="patrón con nombre (k3, c4, k13, ...)")
        parser.add_argument("--n", type=int, default=None, help="añade las fórmulas de umbral para este n")
        parser.add_argument("--c", default="1")

    def handle(self, *args, **opts):
        try:
            if opts["pattern"]:
                graph = parse_pattern(opts["pattern"]).graph
            elif opts["graph6"]:
                graph = parse_graph(opts["graph6"])
            elif opts["input"] == "-":
                graph = parse_graph(sys.stdin.read())
            else:
                graph = read_graph(opts["input"])
            report = profile_report(graph, opts["n"], opts["c"])
        except (LabError, OSError) as e:
            raise CommandError(str(e))
        self.stdout.write(json.dumps(report, indent=2, ensure_ascii=False))
