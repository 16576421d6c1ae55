from django.dispatch import Signal

# Sent once per evaluated reproduction claim with ``claim`` and ``run_id``.
claim_evaluated = Signal()
