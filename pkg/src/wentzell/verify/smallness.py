"""Case table of the existence theorem: which smallness condition applies, and does it hold."""

from __future__ import annotations

import math

from wentzell.errors import DomainError
from wentzell.models import SmallnessVerdict


def smallness_threshold(M: float) -> float:
    """M / (2 sqrt 2)."""
    return M / (2.0 * math.sqrt(2.0))


def smallness_check(theta1: float, theta2: float, c1: float, c2: float, M: float) -> SmallnessVerdict:
    """Classify (theta1, theta2) into cases 1-4 and test the strict constant condition.

    1. theta1, theta2 < 1: no restriction, margin +inf.
    2. theta1 < 1, theta2 = 1: c2 < M/(2 sqrt 2).
    3. theta1 = 1, theta2 < 1: c1 < M/(2 sqrt 2).
    4. theta1 = theta2 = 1: c1 + c2 < M/(2 sqrt 2).
    """
    for name, theta in (("theta1", theta1), ("theta2", theta2)):
        if not 0.0 <= theta <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1], got {theta}")
    for name, c in (("c1", c1), ("c2", c2)):
        if not (math.isfinite(c) and c > 0):
            raise DomainError(f"{name} must be positive, got {c}")
    if not (math.isfinite(M) and M > 0):
        raise DomainError(f"coercivity constant must be positive, got {M}")

    threshold = smallness_threshold(M)
    match (theta1 < 1.0, theta2 < 1.0):
        case (True, True):
            return SmallnessVerdict(1, True, math.inf, "theta1, theta2 < 1")
        case (True, False):
            return SmallnessVerdict(2, c2 < threshold, threshold - c2, "c2 < M/(2*sqrt(2))")
        case (False, True):
            return SmallnessVerdict(3, c1 < threshold, threshold - c1, "c1 < M/(2*sqrt(2))")
        case _:
            total = c1 + c2
            return SmallnessVerdict(4, total < threshold, threshold - total, "c1 + c2 < M/(2*sqrt(2))")
