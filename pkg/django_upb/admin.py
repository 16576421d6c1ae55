"""Django admin for stored reproduction claims."""

import csv
import json
from typing import Any

from django.contrib import admin
from django.db.models import QuerySet
from django.http import HttpResponse
from django.utils.html import format_html
from django.utils.translation import gettext_lazy as _

from .models import ClaimRecord, Outcome


@admin.register(ClaimRecord)
class ClaimRecordAdmin(admin.ModelAdmin):
    list_display = (
        "created_at",
        "claim_id",
        "outcome_display",
        "runtime_display",
        "run_id",
    )
    list_filter = ("outcome", "claim_id", "created_at")
    search_fields = ("claim_id", "description", "run_id")
    date_hierarchy = "created_at"
    readonly_fields = ("created_at", "updated_at", "computed_pretty", "expected_pretty")
    list_per_page = 50
    ordering = ["-created_at"]

    fieldsets = (
        (
            _("Claim"),
            {"fields": ("claim_id", "description", "outcome", "run_id", "runtime")},
        ),
        (
            _("Values"),
            {"fields": ("computed_pretty", "expected_pretty")},
        ),
        (
            _("Timestamps"),
            {"fields": ("created_at", "updated_at"), "classes": ("collapse",)},
        ),
    )

    actions = ["export_to_csv"]

    @admin.display(description=_("Outcome"), ordering="outcome")
    def outcome_display(self, obj: ClaimRecord) -> str:
        color = "#28a745" if obj.outcome == Outcome.PASS else "#dc3545"
        return format_html(
            '<span style="background-color: {}; color: white; '
            'padding: 3px 8px; border-radius: 3px; font-weight: bold;">'
            "{}"
            "</span>",
            color,
            obj.get_outcome_display(),
        )

    @admin.display(description=_("Runtime"), ordering="runtime")
    def runtime_display(self, obj: ClaimRecord) -> str:
        if obj.runtime is None:
            return "-"
        return f"{obj.runtime:.2f}s"

    @admin.display(description=_("Computed"))
    def computed_pretty(self, obj: ClaimRecord) -> str:
        return format_html("<pre>{}</pre>", json.dumps(obj.computed, indent=2, sort_keys=True))

    @admin.display(description=_("Expected"))
    def expected_pretty(self, obj: ClaimRecord) -> str:
        return format_html("<pre>{}</pre>", json.dumps(obj.expected, indent=2, sort_keys=True))

    @admin.action(description=_("Export selected claims to CSV"))
    def export_to_csv(
        self, request: Any, queryset: QuerySet[ClaimRecord]
    ) -> HttpResponse:
        response = HttpResponse(content_type="text/csv")
        response["Content-Disposition"] = 'attachment; filename="upb_claims.csv"'

        writer = csv.writer(response)
        writer.writerow(
            ["CreatedAt", "RunId", "ClaimId", "Outcome", "Runtime", "Computed", "Expected"]
        )
        for record in queryset:
            writer.writerow(
                [
                    record.created_at.isoformat(),
                    record.run_id,
                    record.claim_id,
                    record.outcome,
                    record.runtime,
                    json.dumps(record.computed, sort_keys=True),
                    json.dumps(record.expected, sort_keys=True),
                ]
            )
        return response
