from django.db import models

from .formats import parse_graph6, serialize_graph6


class GraphRecord(models.Model):
    SOURCE_CHOICES = [
        ("UPLOAD", "Upload"),
        ("GNP", "G(n,p)"),
        ("PERTURBED", "Perturbed"),
        ("EXTREMAL", "Extremal base"),
        ("MINDEG", "Min-degree base"),
    ]

    name = models.CharField(max_length=255, blank=True)
    n = models.PositiveIntegerField()
    edge_count = models.PositiveIntegerField(default=0)
    graph6 = models.TextField()  # codificación canónica del grafo
    source = models.CharField(max_length=20, choices=SOURCE_CHOICES, default="UPLOAD")
    seed = models.CharField(max_length=32, blank=True)  # raíz de 64 bits como texto
    parameters = models.JSONField(default=dict, blank=True)  # p, base, c...
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ["-created_at"]

    def __str__(self):
        return self.name or f"G(n={self.n}, e={self.edge_count})"

    def to_graph(self):
        return parse_graph6(self.graph6)

    @staticmethod
    def source_for(base_kind, p):
        if p > 0:
            return "GNP" if base_kind == "empty" else "PERTURBED"
        return {"extremal": "EXTREMAL", "mindeg": "MINDEG"}.get(base_kind, "UPLOAD")

    @classmethod
    def from_graph(cls, graph, **kwargs):
        return cls(n=graph.n, edge_count=graph.edge_count, graph6=serialize_graph6(graph), **kwargs)
