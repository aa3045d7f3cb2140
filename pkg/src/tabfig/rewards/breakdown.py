"""Per-agent reward functions as weighted component sums.

Weights are configuration, not published values: the defaults split
format/accuracy evenly for the selection-style agents and put most of
the mass on semantic quality for the writing agent. Per agent the
weights are nonnegative and sum to one, which keeps every total in
[0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..agents.tags import extract_tag
from ..agents.toolcalls import parse_tool_call_text
from ..errors import TagError
from ..metrics.semantic import embedding_f1
from ..tools.registry import ToolCall
from .components import (
    expert_accuracy,
    extract_options,
    format_reward,
    length_reward,
    multichoice_f1,
)

_DEFAULT_WEIGHTS = {
    "planner": {"format": 0.5, "accuracy": 0.5},
    "expert": {"format": 0.5, "accuracy": 0.5},
    "solver": {"format": 0.2, "length": 0.2, "semantic": 0.6},
    "critic": {"format": 0.5, "accuracy": 0.5},
}


def _validated(agent: str, weights: dict[str, float]) -> dict[str, float]:
    if any(w < 0 for w in weights.values()):
        raise ValueError(f"{agent} weights must be nonnegative")
    total = sum(weights.values())
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"{agent} weights must sum to 1, got {total}")
    return dict(weights)


@dataclass
class RewardWeights:
    planner: dict[str, float] = field(default_factory=lambda: dict(_DEFAULT_WEIGHTS["planner"]))
    expert: dict[str, float] = field(default_factory=lambda: dict(_DEFAULT_WEIGHTS["expert"]))
    solver: dict[str, float] = field(default_factory=lambda: dict(_DEFAULT_WEIGHTS["solver"]))
    critic: dict[str, float] = field(default_factory=lambda: dict(_DEFAULT_WEIGHTS["critic"]))

    def __post_init__(self):
        for agent in ("planner", "expert", "solver", "critic"):
            setattr(self, agent, _validated(agent, getattr(self, agent)))

    def for_agent(self, agent: str) -> dict[str, float]:
        return getattr(self, agent)

    @classmethod
    def from_dict(cls, d: dict) -> "RewardWeights":
        kwargs = {k: v for k, v in d.items() if k in ("planner", "expert", "solver", "critic")}
        return cls(**kwargs)


@dataclass
class RewardBreakdown:
    """Named components in [0, 1] plus their weighted total."""

    agent: str
    components: dict[str, float]
    weights: dict[str, float]

    def __post_init__(self):
        if set(self.components) != set(self.weights):
            raise ValueError("components and weights must name the same terms")
        for name, value in self.components.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"component {name} out of range: {value}")

    @property
    def total(self) -> float:
        return sum(self.weights[m] * self.components[m] for m in self.components)

    def as_dict(self) -> dict:
        return {
            "agent": self.agent,
            "components": dict(self.components),
            "weights": dict(self.weights),
            "total": self.total,
        }


def planner_reward(z: str, gold_options: set[str], weights: RewardWeights | None = None) -> RewardBreakdown:
    """Format compliance plus multi-choice selection accuracy.

    Options are read from the planner's ``<plan>`` tag; unparseable
    output scores 0 on accuracy as well (no options can be extracted).
    """
    w = (weights or RewardWeights()).planner
    fmt = format_reward(z, "planner")
    options = extract_options(z, "plan") if fmt else None
    accuracy = multichoice_f1(options, gold_options) if options is not None else 0.0
    return RewardBreakdown("planner", {"format": float(fmt), "accuracy": accuracy}, w)


def critic_reward(z: str, gold_options: set[str], weights: RewardWeights | None = None) -> RewardBreakdown:
    """Same shape as the planner reward, with options in ``<feedback>``."""
    w = (weights or RewardWeights()).critic
    fmt = format_reward(z, "critic")
    options = extract_options(z, "feedback") if fmt else None
    accuracy = multichoice_f1(options, gold_options) if options is not None else 0.0
    return RewardBreakdown("critic", {"format": float(fmt), "accuracy": accuracy}, w)


def expert_reward(z: str, gold_call: ToolCall, weights: RewardWeights | None = None) -> RewardBreakdown:
    """Format compliance plus tool selection and parameter correctness."""
    w = (weights or RewardWeights()).expert
    fmt = format_reward(z, "expert")
    try:
        call = parse_tool_call_text(z)
    except TagError:
        call = None
    accuracy = expert_accuracy(call, gold_call) if call is not None else 0.0
    return RewardBreakdown("expert", {"format": float(fmt), "accuracy": accuracy}, w)


def solver_reward(z: str, z_ref: str, embedder, weights: RewardWeights | None = None) -> RewardBreakdown:
    """Format compliance, length band, and token-embedding similarity.

    Length and semantic terms score the ``<answer>`` content when the
    output parses, else the raw text (with the format term at 0).
    """
    w = (weights or RewardWeights()).solver
    fmt = format_reward(z, "solver")
    answer = z
    if fmt:
        try:
            answer = extract_tag(z, "answer") or z
        except TagError:
            answer = z
    length = length_reward(answer, z_ref)
    semantic = embedding_f1(z_ref, answer, embedder)
    return RewardBreakdown(
        "solver",
        {"format": float(fmt), "length": float(length), "semantic": semantic},
        w,
    )
