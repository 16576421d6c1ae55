"""Tests for constants module."""

import math

from django_upb.constants import (
    BRANCH_EXTREMA,
    CLAIM_LOG_FORMAT,
    SEESAW_LOG_FORMAT,
    SYMMETRIC_G,
    SYMMETRIC_MAX_OVERLAP,
    SYMMETRIC_OPTIMUM_SIN,
    VERDICT_LOG_FORMAT,
)


class TestConstants:
    """Test constants."""

    def test_claim_log_format_has_placeholders(self):
        """Test that CLAIM_LOG_FORMAT has expected placeholders."""
        for placeholder in ("claim_id", "description", "outcome", "computed", "expected", "run_id"):
            assert f"{{{placeholder}}}" in CLAIM_LOG_FORMAT

    def test_log_formats_render(self):
        """Test that the log lines format with their fields."""
        line = VERDICT_LOG_FORMAT.format(layout="2x2x2x2", size=6, unextendible=True, method="search")
        assert "Size=6" in line
        line = SEESAW_LOG_FORMAT.format(
            partition="A|B", max_overlap=0.5, G=1.0, best_restart=0, restarts=4, sweeps=3
        )
        assert "MaxOverlap=0.5000000000" in line

    def test_symmetric_optimum(self):
        """Test the closed-form optimum constants."""
        assert SYMMETRIC_MAX_OVERLAP == 3 * math.sqrt(6) / 56
        assert SYMMETRIC_G == -math.log2(SYMMETRIC_MAX_OVERLAP)
        assert 0 < SYMMETRIC_OPTIMUM_SIN < 1
        assert BRANCH_EXTREMA == (0.0, 1.0 / 126.0)
