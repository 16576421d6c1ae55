"""Tests for configuration validation and settings management."""

import math

import pytest
from django.core.exceptions import ImproperlyConfigured
from django.test import override_settings

from django_upb.conf import DEFAULTS, settings


class TestConfigurationValidation:
    """Test configuration validation."""

    @override_settings(UPB={})
    def test_default_settings_are_valid(self):
        """Test that default settings work correctly."""
        settings.reset()
        assert settings.GENERIC_ANGLES == (0.3, 0.7, 1.1, 0.4)
        assert settings.SEESAW_RESTARTS == 64
        assert settings.SEESAW_SEED == 7
        assert settings.RANK_TOLERANCE == 1e-9
        assert settings.PERSIST_CLAIMS is False

    @override_settings(UPB={"SEESAW_RESTARTS": 8})
    def test_dict_configuration(self):
        """Test dictionary-style configuration."""
        settings.reset()
        assert settings.SEESAW_RESTARTS == 8

    @override_settings(UPB={}, UPB_SEESAW_SEED=11)
    def test_individual_settings(self):
        """Test individual UPB_* settings."""
        settings.reset()
        assert settings.SEESAW_SEED == 11

    def test_settings_priority_dict_over_individual(self):
        """Test that dict settings take priority over individual."""
        with override_settings(UPB={"SEESAW_SEED": 1}, UPB_SEESAW_SEED=2):
            settings.reset()
            assert settings.SEESAW_SEED == 1

    def test_individual_setting_change_clears_cache(self):
        """Test that changing a UPB_* setting drops the cached value."""
        with override_settings(UPB={}, UPB_SEESAW_MAX_ITERS=10):
            settings.reset()
            assert settings.SEESAW_MAX_ITERS == 10
            with override_settings(UPB_SEESAW_MAX_ITERS=20):
                assert settings.SEESAW_MAX_ITERS == 20
        settings.reset()

    def test_invalid_setting_name(self):
        """Test that accessing invalid setting raises AttributeError."""
        with pytest.raises(AttributeError):
            _ = settings.INVALID_SETTING_NAME

    def test_every_default_has_a_value(self):
        """Test that every default validates."""
        with override_settings(UPB={}):
            settings.reset()
            for name in DEFAULTS:
                getattr(settings, name)
        settings.reset()


class TestToleranceValidation:
    """Test numerical tolerance validation."""

    @override_settings(UPB={"RANK_TOLERANCE": 1e-8})
    def test_valid_tolerance(self):
        """Test a valid tolerance."""
        settings.reset()
        assert settings.RANK_TOLERANCE == 1e-8

    @pytest.mark.parametrize("value", [0, 1.5, -1e-9])
    def test_out_of_range(self, value):
        """Test that tolerances must lie in (0, 1)."""
        with override_settings(UPB={"PSD_TOLERANCE": value}):
            settings.reset()
            with pytest.raises(ImproperlyConfigured) as exc_info:
                _ = settings.PSD_TOLERANCE
        assert "strictly between 0 and 1" in str(exc_info.value)

    @override_settings(UPB={"ORTHOGONALITY_TOLERANCE": "tight"})
    def test_non_numeric(self):
        """Test that non-numeric tolerances raise."""
        settings.reset()
        with pytest.raises(ImproperlyConfigured) as exc_info:
            _ = settings.ORTHOGONALITY_TOLERANCE
        assert "must be a number" in str(exc_info.value)

    @override_settings(UPB={"RANK_TOLERANCE": 0.01})
    def test_loose_tolerance_warns(self, caplog):
        """Test that a loose tolerance logs a warning."""
        settings.reset()
        _ = settings.RANK_TOLERANCE
        assert "is loose" in caplog.text


class TestAngleValidation:
    """Test GENERIC_ANGLES validation."""

    @override_settings(UPB={"GENERIC_ANGLES": [0.2, 0.4, 0.6, 0.8]})
    def test_valid_angles(self):
        """Test that lists are stored as tuples."""
        settings.reset()
        assert settings.GENERIC_ANGLES == (0.2, 0.4, 0.6, 0.8)

    @override_settings(UPB={"GENERIC_ANGLES": (0.2, 0.4, 0.6)})
    def test_wrong_count(self):
        """Test that exactly four angles are required."""
        settings.reset()
        with pytest.raises(ImproperlyConfigured) as exc_info:
            _ = settings.GENERIC_ANGLES
        assert "four angles" in str(exc_info.value)

    @override_settings(UPB={"GENERIC_ANGLES": (0.2, 0.4, 0.6, math.pi / 2)})
    def test_boundary_angle(self):
        """Test that pi/2 is outside the open interval."""
        settings.reset()
        with pytest.raises(ImproperlyConfigured) as exc_info:
            _ = settings.GENERIC_ANGLES
        assert "(0, pi/2)" in str(exc_info.value)

    @override_settings(UPB={"GENERIC_ANGLES": (0.2, "x", 0.6, 0.8)})
    def test_non_numeric_angle(self):
        """Test that every angle must be a number."""
        settings.reset()
        with pytest.raises(ImproperlyConfigured):
            _ = settings.GENERIC_ANGLES

    @override_settings(UPB={"GENERIC_ANGLES": (0.5, 0.5, 0.5, 0.5)})
    def test_repeated_angles_warn(self, caplog):
        """Test that repeated angles log a warning."""
        settings.reset()
        _ = settings.GENERIC_ANGLES
        assert "repeated angles" in caplog.text


class TestIntegerValidation:
    """Test restarts, seeds and budgets."""

    @override_settings(UPB={"SEESAW_RESTARTS": 0})
    def test_restarts_minimum(self):
        """Test that at least one restart is required."""
        settings.reset()
        with pytest.raises(ImproperlyConfigured) as exc_info:
            _ = settings.SEESAW_RESTARTS
        assert "must be >= 1" in str(exc_info.value)

    @override_settings(UPB={"SEESAW_SEED": 0})
    def test_zero_seed(self):
        """Test that seed zero is allowed."""
        settings.reset()
        assert settings.SEESAW_SEED == 0

    @override_settings(UPB={"SEESAW_MAX_ITERS": True})
    def test_bool_rejected(self):
        """Test that booleans are not integers here."""
        settings.reset()
        with pytest.raises(ImproperlyConfigured) as exc_info:
            _ = settings.SEESAW_MAX_ITERS
        assert "got bool" in str(exc_info.value)

    @override_settings(UPB={"EQUIVALENCE_BUDGET": 10})
    def test_budget_minimum(self):
        """Test the budget floor."""
        settings.reset()
        with pytest.raises(ImproperlyConfigured) as exc_info:
            _ = settings.EQUIVALENCE_BUDGET
        assert "must be >= 100" in str(exc_info.value)

    @override_settings(UPB={"GRID_MAX_POINTS": "many"})
    def test_budget_non_numeric(self):
        """Test that budgets must be integers."""
        settings.reset()
        with pytest.raises(ImproperlyConfigured) as exc_info:
            _ = settings.GRID_MAX_POINTS
        assert "must be an integer" in str(exc_info.value)


class TestLogLevelValidation:
    """Test LOG_LEVEL validation."""

    @override_settings(UPB={"LOG_LEVEL": "debug"})
    def test_log_level_case_insensitive(self):
        """Test that log level is converted to uppercase."""
        settings.reset()
        assert settings.LOG_LEVEL == "DEBUG"

    @override_settings(UPB={"LOG_LEVEL": "INVALID"})
    def test_invalid_log_level(self):
        """Test that invalid log level raises error."""
        settings.reset()
        with pytest.raises(ImproperlyConfigured) as exc_info:
            _ = settings.LOG_LEVEL
        assert "must be one of" in str(exc_info.value)

    @override_settings(UPB={"LOG_LEVEL": 123})
    def test_non_string_log_level(self):
        """Test that non-string log level raises error."""
        settings.reset()
        with pytest.raises(ImproperlyConfigured) as exc_info:
            _ = settings.LOG_LEVEL
        assert "must be a string" in str(exc_info.value)


class TestBooleanValidation:
    """Test boolean settings validation."""

    @override_settings(UPB={"PERSIST_CLAIMS": "yes"})
    def test_string_true_conversion(self):
        """Test string 'yes' converts to boolean."""
        settings.reset()
        assert settings.PERSIST_CLAIMS is True

    @override_settings(UPB={"ENABLE_CONSOLE_LOGGING": "off"})
    def test_string_false_conversion(self):
        """Test string 'off' converts to boolean."""
        settings.reset()
        assert settings.ENABLE_CONSOLE_LOGGING is False

    @override_settings(UPB={"PERSIST_CLAIMS": 1})
    def test_numeric_to_boolean_conversion(self, caplog):
        """Test numeric value converts to boolean with warning."""
        settings.reset()
        assert settings.PERSIST_CLAIMS is True
        assert "should be a boolean" in caplog.text.lower()
