from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from densities.invariants import parse_pattern
from graphs.exceptions import LabError
from graphs.formats import serialize_graph, write_graph
from graphs.models import GraphRecord
from graphs.random_models import PerturbedSpec, Seed, parse_base_descriptor, sample_perturbed


class Command(BaseCommand):
    help = "Muestrea base ∪ G(n,p) con semilla y lo emite como lista de aristas o graph6"

    def add_arguments(self, parser):
        parser.add_argument("--n", type=int, required=True)
        parser.add_argument("--p", type=float, default=0.0)
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument("--base", default="empty", help="empty|complete|extremal:a|mindeg:alpha|file:PATH")
        parser.add_argument("--pattern", default="k3", help="patrón H (solo para la base extremal)")
        parser.add_argument("--format", choices=["edgelist", "graph6"], default="edgelist")
        parser.add_argument("--output", default=None, help="archivo de salida (stdout si se omite)")
        parser.add_argument("--save", action="store_true", help="guarda el grafo como GraphRecord")

    def handle(self, *args, **opts):
        seed = opts["seed"] if opts["seed"] is not None else settings.LAB_DEFAULT_SEED
        try:
            base = parse_base_descriptor(opts["base"])
            pattern = parse_pattern(opts["pattern"]) if base.kind == "extremal" else None
            _, graph = sample_perturbed(PerturbedSpec(base, opts["p"]), opts["n"], Seed(seed), pattern)
        except (LabError, OSError) as e:
            raise CommandError(str(e))

        if opts["output"]:
            write_graph(graph, opts["output"], opts["format"])
            self.stdout.write(self.style.SUCCESS(f"✅ Grafo escrito en {opts['output']} (n={graph.n}, e={graph.edge_count})"))
        else:
            self.stdout.write(serialize_graph(graph, opts["format"]), ending="")

        if opts["save"]:
            record = GraphRecord.from_graph(
                graph,
                source=GraphRecord.source_for(base.kind, opts["p"]),
                seed=str(seed),
                parameters={"p": opts["p"], "base": str(base)},
            )
            record.save()
            self.stderr.write(self.style.SUCCESS(f"✅ Guardado como GraphRecord #{record.id}"))
