"""Group-relative advantage normalization.

Within one sampled group, each reward is standardized against the group
mean and population standard deviation, so advantages are zero-mean,
unit-variance, and invariant to shifting or positively scaling the whole
group's rewards. Epsilon only floors the denominator (a pure ``std + eps``
denominator would break scale invariance and unit variance for
low-spread groups).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import GroupTooSmall

ADVANTAGE_EPSILON = 1e-8


def group_advantages(rewards: list[float], epsilon: float = ADVANTAGE_EPSILON) -> list[float]:
    """Z-score each reward against its group (population std)."""
    k = len(rewards)
    if k < 2:
        raise GroupTooSmall(f"need at least 2 samples, got {k}")
    if max(rewards) == min(rewards):  # zero-variance guard
        return [0.0] * k
    mean = sum(rewards) / k
    variance = sum((r - mean) ** 2 for r in rewards) / k
    std = math.sqrt(variance)
    return [(r - mean) / max(std, epsilon) for r in rewards]


@dataclass
class GroupSample:
    """One GRPO-style group: K sampled actions with rewards and advantages."""

    actions: list[str]
    rewards: list[float]
    reference: str | set[str] | None = None
    advantages: list[float] = field(default_factory=list)

    def __post_init__(self):
        if len(self.actions) != len(self.rewards):
            raise ValueError("actions and rewards must align")
        if len(self.actions) < 2:
            raise GroupTooSmall(f"group size {len(self.actions)} < 2")
        if not self.advantages:
            self.advantages = group_advantages(self.rewards)
