# Generated by Django 5.2.7 on 2026-03-02 09:14

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="ClaimRecord",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                (
                    "claim_id",
                    models.CharField(
                        db_index=True,
                        help_text="Identifier of the reproduced claim",
                        max_length=64,
                        verbose_name="Claim",
                    ),
                ),
                (
                    "description",
                    models.CharField(
                        blank=True,
                        default="",
                        help_text="What the claim asserts",
                        max_length=255,
                        verbose_name="Description",
                    ),
                ),
                (
                    "computed",
                    models.JSONField(
                        blank=True,
                        default=dict,
                        help_text="Values produced by this run",
                        verbose_name="Computed",
                    ),
                ),
                (
                    "expected",
                    models.JSONField(
                        blank=True,
                        default=dict,
                        help_text="Reference values the run is compared against",
                        verbose_name="Expected",
                    ),
                ),
                (
                    "outcome",
                    models.CharField(
                        choices=[("pass", "Pass"), ("fail", "Fail")],
                        default="fail",
                        max_length=10,
                        verbose_name="Outcome",
                    ),
                ),
                (
                    "runtime",
                    models.FloatField(
                        blank=True,
                        help_text="Wall-clock seconds spent on the claim",
                        null=True,
                        verbose_name="Runtime",
                    ),
                ),
                (
                    "run_id",
                    models.UUIDField(
                        db_index=True,
                        help_text="Groups the claims of one reproduce invocation",
                        verbose_name="Run",
                    ),
                ),
                (
                    "created_at",
                    models.DateTimeField(auto_now_add=True, verbose_name="Created At"),
                ),
                (
                    "updated_at",
                    models.DateTimeField(auto_now=True, verbose_name="Updated At"),
                ),
            ],
            options={
                "verbose_name": "Claim Record",
                "verbose_name_plural": "Claim Records",
                "ordering": ["-created_at"],
                "indexes": [
                    models.Index(
                        fields=["claim_id", "-created_at"],
                        name="django_upb_claim_created_idx",
                    ),
                    models.Index(
                        fields=["outcome", "-created_at"],
                        name="django_upb_outcome_created_idx",
                    ),
                ],
            },
        ),
    ]
