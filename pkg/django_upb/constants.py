"""Constants for django-upb log lines and report formatting."""

import math

# Verdict log line emitted by every unextendibility check
VERDICT_LOG_FORMAT = (
    "Unextendibility checked: "
    "Layout={layout}, "
    "Size={size}, "
    "Unextendible={unextendible}, "
    "Method={method}"
)

# Reproduction claim log line
CLAIM_LOG_FORMAT = (
    "Claim evaluated: "
    "Id={claim_id}, "
    "Description={description}, "
    "Outcome={outcome}, "
    "Computed={computed}, "
    "Expected={expected}, "
    "Runtime={runtime:.3f}s, "
    "Run={run_id}"
)

# See-saw summary line
SEESAW_LOG_FORMAT = (
    "See-saw finished: "
    "Partition={partition}, "
    "MaxOverlap={max_overlap:.10f}, "
    "G={G:.6f}, "
    "BestRestart={best_restart}, "
    "Restarts={restarts}, "
    "Sweeps={sweeps}"
)

# Closed-form optimum at alpha = beta = gamma = delta = pi/4
SYMMETRIC_MAX_OVERLAP = 3.0 * math.sqrt(6.0) / 56.0
SYMMETRIC_OPTIMUM_SIN = (math.sqrt(6.0) - 2.0) / 2.0
SYMMETRIC_G = -math.log2(SYMMETRIC_MAX_OVERLAP)
BRANCH_EXTREMA = (0.0, 1.0 / 126.0)

# JSON output
JSON_INDENT = 2
