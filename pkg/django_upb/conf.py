"""Configuration management for django-upb."""

import logging
import math
from typing import Any, Callable, Dict, Tuple

from django.conf import settings as dj_settings
from django.core.exceptions import ImproperlyConfigured
from django.core.signals import setting_changed

logger = logging.getLogger(__name__)

# Type definitions for validators
ValidatorFunc = Callable[[Any, str], Tuple[Any, str]]

VALID_LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]

DEFAULTS: Dict[str, Any] = {
    # Numerical tolerances
    "RANK_TOLERANCE": 1e-9,
    "ORTHOGONALITY_TOLERANCE": 1e-10,
    "PSD_TOLERANCE": 1e-10,
    "HERMITIAN_TOLERANCE": 1e-12,
    # alpha, beta, gamma, delta used whenever a symbolic matrix needs numbers
    "GENERIC_ANGLES": (0.3, 0.7, 1.1, 0.4),
    # See-saw optimizer
    "SEESAW_RESTARTS": 64,
    "SEESAW_MAX_ITERS": 500,
    "SEESAW_TOLERANCE": 1e-12,
    "SEESAW_SEED": 7,
    # Search budgets
    "EQUIVALENCE_BUDGET": 1_000_000,
    "GRID_MAX_POINTS": 100_000_000,
    # Persistence
    "PERSIST_CLAIMS": False,
    # Logging configuration
    "ENABLE_CONSOLE_LOGGING": True,
    "LOG_LEVEL": "WARNING",
}


def validate_tolerance(value: Any, setting_name: str) -> Tuple[float, str]:
    """
    Validate a numerical tolerance.

    Args:
        value: Setting value to validate
        setting_name: Name of the setting

    Returns:
        tuple: (validated_value, error_message)

    Raises:
        ImproperlyConfigured: If value is not a number in (0, 1)
    """
    try:
        tol = float(value)
    except (TypeError, ValueError):
        raise ImproperlyConfigured(
            f"{setting_name} must be a number, got {type(value).__name__}: {value}"
        )

    if not 0.0 < tol < 1.0:
        raise ImproperlyConfigured(
            f"{setting_name} must lie strictly between 0 and 1, got {tol}"
        )

    if tol > 1e-4:
        logger.warning(
            f"{setting_name}={tol} is loose; rank and orthogonality verdicts "
            f"may be unreliable."
        )

    return tol, ""


def validate_positive_integer(
    value: Any, setting_name: str, min_value: int = 1
) -> Tuple[int, str]:
    """
    Validate a positive integer setting.

    Args:
        value: Setting value to validate
        setting_name: Name of the setting
        min_value: Minimum allowed value

    Returns:
        tuple: (validated_value, error_message)

    Raises:
        ImproperlyConfigured: If value is invalid
    """
    if isinstance(value, bool):
        raise ImproperlyConfigured(
            f"{setting_name} must be an integer, got bool: {value}"
        )
    try:
        int_value = int(value)
    except (TypeError, ValueError):
        raise ImproperlyConfigured(
            f"{setting_name} must be an integer, got {type(value).__name__}: {value}"
        )

    if int_value < min_value:
        raise ImproperlyConfigured(
            f"{setting_name} must be >= {min_value}, got {int_value}"
        )

    return int_value, ""


def validate_seed(value: Any, setting_name: str) -> Tuple[int, str]:
    """Validate SEESAW_SEED (non-negative integer)."""
    return validate_positive_integer(value, setting_name, min_value=0)


def validate_angles(value: Any, setting_name: str) -> Tuple[Tuple[float, ...], str]:
    """
    Validate GENERIC_ANGLES.

    Args:
        value: Setting value to validate
        setting_name: Name of the setting

    Returns:
        tuple: (validated_value, error_message)

    Raises:
        ImproperlyConfigured: Unless four numbers in the open interval (0, pi/2)
    """
    if not isinstance(value, (list, tuple)) or len(value) != 4:
        raise ImproperlyConfigured(
            f"{setting_name} must be a sequence of four angles, got {value!r}"
        )

    angles = []
    for angle in value:
        try:
            angle = float(angle)
        except (TypeError, ValueError):
            raise ImproperlyConfigured(
                f"{setting_name} must contain only numbers, got {angle!r}"
            )
        if not 0.0 < angle < math.pi / 2:
            raise ImproperlyConfigured(
                f"{setting_name} angles must lie in (0, pi/2), got {angle}"
            )
        angles.append(angle)

    if len(set(angles)) < 4:
        logger.warning(
            f"{setting_name} contains repeated angles; symmetric bindings can "
            f"hide degeneracies."
        )

    return tuple(angles), ""


def validate_boolean(value: Any, setting_name: str) -> Tuple[bool, str]:
    """
    Validate a boolean setting.

    Args:
        value: Setting value to validate
        setting_name: Name of the setting

    Returns:
        tuple: (validated_value, error_message)
    """
    if isinstance(value, bool):
        return value, ""

    if isinstance(value, str):
        lower = value.lower()
        if lower in ("true", "1", "yes", "on"):
            return True, ""
        if lower in ("false", "0", "no", "off"):
            return False, ""

    try:
        bool_value = bool(value)
        logger.warning(
            f"{setting_name} should be a boolean, got {type(value).__name__}: {value}. "
            f"Converted to {bool_value}."
        )
        return bool_value, ""
    except Exception:
        raise ImproperlyConfigured(
            f"{setting_name} must be a boolean, got {type(value).__name__}: {value}"
        )


def validate_log_level(value: Any, setting_name: str) -> Tuple[str, str]:
    """
    Validate LOG_LEVEL setting.

    Raises:
        ImproperlyConfigured: If value is not a known level name
    """
    if not isinstance(value, str):
        raise ImproperlyConfigured(
            f"{setting_name} must be a string, got {type(value).__name__}: {value}"
        )

    upper_value = value.upper()
    if upper_value not in VALID_LOG_LEVELS:
        raise ImproperlyConfigured(
            f"{setting_name} must be one of {VALID_LOG_LEVELS}, got: {value}"
        )

    return upper_value, ""


def validate_budget(value: Any, setting_name: str) -> Tuple[int, str]:
    """Validate search budgets (at least 100 nodes or grid points)."""
    return validate_positive_integer(value, setting_name, min_value=100)


VALIDATORS: Dict[str, ValidatorFunc] = {
    "RANK_TOLERANCE": validate_tolerance,
    "ORTHOGONALITY_TOLERANCE": validate_tolerance,
    "PSD_TOLERANCE": validate_tolerance,
    "HERMITIAN_TOLERANCE": validate_tolerance,
    "GENERIC_ANGLES": validate_angles,
    "SEESAW_RESTARTS": validate_positive_integer,
    "SEESAW_MAX_ITERS": validate_positive_integer,
    "SEESAW_TOLERANCE": validate_tolerance,
    "SEESAW_SEED": validate_seed,
    "EQUIVALENCE_BUDGET": validate_budget,
    "GRID_MAX_POINTS": validate_budget,
    "PERSIST_CLAIMS": validate_boolean,
    "ENABLE_CONSOLE_LOGGING": validate_boolean,
    "LOG_LEVEL": validate_log_level,
}


class Settings:
    """
    Settings management for django-upb.

    Allows settings to be configured either through:
    1. A UPB dictionary in Django settings
    2. Individual UPB_* settings

    Values are validated on first access and cached. Outside a configured
    Django project (plain library use) the defaults apply.
    """

    def __getattr__(self, name: str) -> Any:
        if name not in DEFAULTS:
            raise AttributeError(
                f"'{self.__class__.__name__}' object has no attribute '{name}'"
            )

        value = self._get_setting(name)
        setattr(self, name, value)
        return value

    def _get_setting(self, setting: str, validate: bool = True) -> Any:
        """
        Get setting value from Django settings or defaults.

        Priority order:
        1. UPB dictionary setting
        2. Individual UPB_* setting
        3. Default value

        Raises:
            ImproperlyConfigured: If validation fails
        """
        if not dj_settings.configured:
            return DEFAULTS[setting]

        upb_config = getattr(dj_settings, "UPB", {}) or {}
        if setting in upb_config:
            value = upb_config[setting]
        else:
            value = getattr(dj_settings, f"UPB_{setting}", DEFAULTS[setting])

        if validate and setting in VALIDATORS:
            validator = VALIDATORS[setting]
            setting_full_name = f"UPB['{setting}'] or UPB_{setting}"
            try:
                validated_value, _ = validator(value, setting_full_name)
                return validated_value
            except ImproperlyConfigured:
                raise
            except Exception as e:
                raise ImproperlyConfigured(
                    f"Error validating {setting_full_name}: {e}"
                ) from e

        return value

    def change_setting(
        self, setting: str, value: Any, enter: bool, **kwargs: Any
    ) -> None:
        """
        Handle Django setting changes via setting_changed signal.

        Cached values are dropped rather than replaced so the next access
        goes through validation again.
        """
        if setting == "UPB":
            self.reset()
            return

        if not setting.startswith("UPB_"):
            return

        setting_name = setting[len("UPB_"):]
        if setting_name in DEFAULTS and setting_name in self.__dict__:
            delattr(self, setting_name)

    def reset(self) -> None:
        """Reset all cached settings to force reload from Django settings."""
        for key in DEFAULTS:
            if key in self.__dict__:
                delattr(self, key)


settings = Settings()

setting_changed.connect(settings.change_setting)
