"""Persisted outcomes of reproduction runs."""

from django.db import models
from django.utils.translation import gettext_lazy as _


class Outcome(models.TextChoices):
    PASS = "pass", _("Pass")
    FAIL = "fail", _("Fail")


class ClaimRecord(models.Model):
    """One evaluated claim of a reproduction run."""

    claim_id = models.CharField(
        verbose_name=_("Claim"),
        max_length=64,
        db_index=True,
        help_text=_("Identifier of the reproduced claim"),
    )
    description = models.CharField(
        verbose_name=_("Description"),
        max_length=255,
        blank=True,
        default="",
        help_text=_("What the claim asserts"),
    )

    # Values
    computed = models.JSONField(
        verbose_name=_("Computed"),
        default=dict,
        blank=True,
        help_text=_("Values produced by this run"),
    )
    expected = models.JSONField(
        verbose_name=_("Expected"),
        default=dict,
        blank=True,
        help_text=_("Reference values the run is compared against"),
    )
    outcome = models.CharField(
        verbose_name=_("Outcome"),
        max_length=10,
        choices=Outcome.choices,
        default=Outcome.FAIL,
    )
    runtime = models.FloatField(
        verbose_name=_("Runtime"),
        null=True,
        blank=True,
        help_text=_("Wall-clock seconds spent on the claim"),
    )
    run_id = models.UUIDField(
        verbose_name=_("Run"),
        db_index=True,
        help_text=_("Groups the claims of one reproduce invocation"),
    )

    created_at = models.DateTimeField(verbose_name=_("Created At"), auto_now_add=True)
    updated_at = models.DateTimeField(verbose_name=_("Updated At"), auto_now=True)

    class Meta:
        ordering = ["-created_at"]
        indexes = [
            models.Index(fields=["claim_id", "-created_at"], name="django_upb_claim_created_idx"),
            models.Index(fields=["outcome", "-created_at"], name="django_upb_outcome_created_idx"),
        ]
        verbose_name = _("Claim Record")
        verbose_name_plural = _("Claim Records")

    def __str__(self):
        return f"{self.claim_id}: {self.outcome} ({self.run_id})"

    def __repr__(self):
        return (
            f"<ClaimRecord(claim_id={self.claim_id}, "
            f"outcome={self.outcome}, run_id={self.run_id})>"
        )

    @property
    def passed(self):
        return self.outcome == Outcome.PASS
