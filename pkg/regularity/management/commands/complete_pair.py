import json

from django.core.management.base import BaseCommand, CommandError

from densities.invariants import parse_pattern
from graphs.exceptions import LabError
from graphs.formats import parse_vertex_list, read_graph
from regularity.instances import pair_completion_instance
from regularity.views import complete_pair_report


class Command(BaseCommand):
    help = "Completa un par super-regular (S, T) a un H-tiling perfecto de S ∪ T"

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument("--cross", help="capa cruzada S–T (requiere --random, --s, --t)")
        source.add_argument("--synthetic", type=int, metavar="N", help="instancia sintética con |S| = |T| = N")
        parser.add_argument("--random", dest="random_layer", help="capa aleatoria")
        parser.add_argument("--s", help="vértices de S")
        parser.add_argument("--t", help="vértices de T")
        parser.add_argument("--cross-p", type=float, default=0.9)
        parser.add_argument("--random-p", type=float, default=0.3)
        parser.add_argument("--eps", default=None, help="con --d, capa cruzada sintética (ε,d)-super-regular")
        parser.add_argument("--d", default=None)
        parser.add_argument("--pattern", default="k3")
        parser.add_argument("--eps5", default=None)
        parser.add_argument("--phi", default=None)
        parser.add_argument("--d1", default=None)
        parser.add_argument("--seed", type=int, default=None)

    def handle(self, *args, **opts):
        try:
            pattern = parse_pattern(opts["pattern"])
            if opts["synthetic"] is not None:
                size = opts["synthetic"]
                instance = pair_completion_instance(
                    size, size, opts["cross_p"], opts["random_p"], opts["seed"] or 0, eps=opts["eps"], d=opts["d"]
                )
                cross, layer, s, t = instance.cross, instance.random_layer, instance.side_s, instance.side_t
            else:
                if not (opts["random_layer"] and opts["s"] and opts["t"]):
                    raise CommandError("--cross necesita --random, --s y --t")
                cross, layer = read_graph(opts["cross"]), read_graph(opts["random_layer"])
                s, t = parse_vertex_list(opts["s"]), parse_vertex_list(opts["t"])
            report = complete_pair_report(
                cross, layer, s, t, pattern, opts["seed"], eps5=opts["eps5"], phi=opts["phi"], d1=opts["d1"]
            )
        except (LabError, OSError) as e:
            raise CommandError(str(e))
        self.stdout.write(json.dumps(report, indent=2, ensure_ascii=False))
