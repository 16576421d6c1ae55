"""Utility functions for django-upb."""

import math
import re
from typing import List, Sequence

import numpy as np

from .coarse import CoarsePartition
from .exceptions import AngleError, LayoutError
from .loggers import get_logger
from .uom import AngleAssignment

logger = get_logger(__name__)

_PI_TOKEN = re.compile(r"^(?:(?P<factor>\d+(?:\.\d+)?)\*?)?pi(?:/(?P<divisor>\d+(?:\.\d+)?))?$")


def parse_angle(token: str) -> float:
    """
    Parse one angle in radians.

    Accepts decimals (``0.3``) and multiples of pi (``pi/4``, ``3pi/8``,
    ``3*pi/8``), evaluated at full precision.

    Raises:
        AngleError: If the token is not understood
    """
    text = token.strip().lower().replace(" ", "")
    match = _PI_TOKEN.match(text)
    if match:
        factor = float(match.group("factor") or 1.0)
        divisor = float(match.group("divisor") or 1.0)
        if divisor == 0.0:
            raise AngleError(f"division by zero in angle {token!r}")
        return factor * math.pi / divisor
    try:
        return float(text)
    except ValueError:
        raise AngleError(f"cannot parse angle {token!r}")


def parse_angles(text: str) -> AngleAssignment:
    """
    Parse ``alpha,beta,gamma,delta``; a single value binds all four.

    Raises:
        AngleError: If the count is wrong or an angle is out of range
    """
    values = [parse_angle(token) for token in text.split(",") if token.strip()]
    if len(values) == 1:
        return AngleAssignment.uniform(values[0])
    if len(values) != 4:
        raise AngleError(f"expected 1 or 4 angles, got {len(values)}")
    return AngleAssignment(*values)


def parse_cut(text: str) -> CoarsePartition:
    """
    Parse a partition string such as ``AB|CD``.

    Raises:
        LayoutError: If the blocks are empty or overlap
    """
    if not text or not text.strip():
        raise LayoutError("empty partition string")
    return CoarsePartition.parse(text)


def random_angles(rng: np.random.Generator, margin: float = 0.1) -> AngleAssignment:
    """Uniform angles kept ``margin`` away from 0 and pi/2."""
    values = rng.uniform(margin, math.pi / 2 - margin, size=4)
    return AngleAssignment(*values)


def format_partitions(partitions: Sequence[CoarsePartition]) -> List[str]:
    return [str(p) for p in partitions]
