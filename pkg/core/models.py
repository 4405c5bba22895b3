from __future__ import annotations

from django.db import models
from django.utils import timezone


class RunRecord(models.Model):
    """One CLI invocation: what ran, on which task and seed, and its summary."""
    class Status(models.TextChoices):
        OK = "ok", "OK"
        CONFIG_ERROR = "config_error", "Erro de configuração"
        FAILED = "failed", "Falhou"

    command = models.CharField(max_length=20)
    task = models.CharField(max_length=20, blank=True)
    method = models.CharField(max_length=10, blank=True)
    seed = models.IntegerField(default=0)
    status = models.CharField(max_length=12, choices=Status.choices, default=Status.OK)
    summary = models.JSONField(default=dict, blank=True)
    config_digest = models.CharField(max_length=16, blank=True)
    run_id = models.CharField(max_length=32, blank=True, db_index=True)
    created_at = models.DateTimeField(default=timezone.now)

    class Meta:
        ordering = ["-created_at", "-id"]
        indexes = [
            models.Index(fields=["task", "method", "seed"]),
        ]

    def __str__(self) -> str:
        return f"{self.command} {self.task} ({self.get_status_display()})"
