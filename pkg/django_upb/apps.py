import logging

from django.apps import AppConfig
from django.core.exceptions import ImproperlyConfigured
from django.utils.translation import gettext_lazy as _

logger = logging.getLogger(__name__)


class UPBConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "django_upb"
    verbose_name = _("Unextendible Product Bases")

    def ready(self) -> None:
        """Connect handlers and validate configuration."""
        from . import handlers  # noqa

        self.validate_settings()

    def validate_settings(self) -> None:
        """
        Touch every UPB setting so a bad value fails at startup rather than
        in the middle of a search.
        """
        from .conf import DEFAULTS
        from .conf import settings as upb_settings

        try:
            for name in DEFAULTS:
                getattr(upb_settings, name)
            logger.debug("UPB settings validated successfully")
        except ImproperlyConfigured as e:
            raise ImproperlyConfigured(
                f"UPB configuration error: {e}\n"
                f"Please check your UPB settings in settings.py"
            ) from e
        except Exception as e:
            logger.error(
                f"Unexpected error validating UPB settings: {e}",
                exc_info=True,
            )
