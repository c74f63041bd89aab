from django.db import models

from .harness import RunKind


class SweepRun(models.Model):
    KIND_CHOICES = [
        (RunKind.SWEEP, "Threshold sweep"),
        (RunKind.EXTREMAL_DEMO, "Extremal demo"),
        (RunKind.BASE_COMPARISON, "Base comparison"),
    ]
    STATUS_CHOICES = [
        ("PENDING", "Pending"),
        ("RUNNING", "Running"),
        ("COMPLETED", "Completed"),
        ("FAILED", "Failed"),
    ]

    kind = models.CharField(max_length=20, choices=KIND_CHOICES, default=RunKind.SWEEP)
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default="PENDING")
    config = models.JSONField(default=dict, blank=True)  # documento tal como se validó
    result = models.JSONField(default=dict, blank=True)
    error = models.TextField(blank=True)
    created_at = models.DateTimeField(auto_now_add=True)
    finished_at = models.DateTimeField(blank=True, null=True)

    class Meta:
        ordering = ["-created_at"]

    def __str__(self):
        return f"{self.get_kind_display()} #{self.pk} ({self.status})"
