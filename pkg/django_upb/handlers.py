"""Signal handlers for evaluated claims."""

import uuid
from typing import Any

from django.dispatch import receiver

from .conf import settings as upb_settings
from .loggers import get_logger
from .services import ClaimRecordService, ClaimResult
from .signals import claim_evaluated

logger = get_logger(__name__)


@receiver(claim_evaluated)
def handle_claim_evaluated(
    sender: Any,
    claim: ClaimResult,
    run_id: uuid.UUID,
    persist: bool = False,
    **_kwargs: Any,
) -> None:
    """
    Log every evaluated claim; store it when ``persist`` or PERSIST_CLAIMS is set.

    Args:
        sender: Signal sender (unused)
        claim: The evaluated claim
        run_id: Identifier shared by the claims of one run
        persist: Per-run request to store the claim
        **_kwargs: Additional signal arguments (unused)
    """
    service = ClaimRecordService(claim, run_id)
    service.log_to_console()
    if persist or upb_settings.PERSIST_CLAIMS:
        record = service.store()
        logger.debug(f"stored {record!r}")
