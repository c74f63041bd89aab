import json

from django.core.management.base import BaseCommand, CommandError

from graphs.exceptions import LabError
from graphs.formats import parse_vertex_list, read_graph
from graphs.utils import as_fraction
from regularity.pairs import CheckMode
from regularity.views import regularity_report, superregularize_report


class Command(BaseCommand):
    help = "Comprueba ε-regularidad y (ε,d)-super-regularidad de un par (A, B)"

    def add_arguments(self, parser):
        parser.add_argument("--host", required=True, help="archivo con lista de aristas o graph6")
        parser.add_argument("--a", required=True, help="vértices de A, p. ej. 0-6 o 0,2,4")
        parser.add_argument("--b", required=True, help="vértices de B")
        parser.add_argument("--eps", required=True, help="racional: 1/4 o 0.25")
        parser.add_argument("--d", default=None, help="con --d se comprueba también la super-regularidad")
        parser.add_argument("--mode", choices=CheckMode.values, default=CheckMode.AUTO)
        parser.add_argument("--trials", type=int, default=2000)
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument("--superregularize", action="store_true", help="recorta el par en vez de sólo comprobarlo")

    def handle(self, *args, **opts):
        try:
            host = read_graph(opts["host"])
            a, b = parse_vertex_list(opts["a"]), parse_vertex_list(opts["b"])
            eps = as_fraction(opts["eps"])
            d = as_fraction(opts["d"]) if opts["d"] is not None else None
            if opts["superregularize"]:
                if d is None:
                    raise CommandError("--superregularize necesita --d")
                report = superregularize_report(host, a, b, eps, d, opts["mode"], opts["trials"], opts["seed"])
            else:
                report = regularity_report(host, a, b, eps, d, opts["mode"], opts["trials"], opts["seed"])
        except (LabError, OSError) as e:
            raise CommandError(str(e))
        self.stdout.write(json.dumps(report, indent=2, ensure_ascii=False))
