from .breakdown import (
    RewardBreakdown,
    RewardWeights,
    critic_reward,
    expert_reward,
    planner_reward,
    solver_reward,
)
from .components import (
    expert_accuracy,
    extract_options,
    format_reward,
    length_reward,
    multichoice_f1,
)
from .groups import ADVANTAGE_EPSILON, GroupSample, group_advantages
from .preference import (
    PreferenceOutcome,
    improves_strictly,
    preference_filter,
    write_preference_dataset,
)

__all__ = [
    "ADVANTAGE_EPSILON",
    "GroupSample",
    "PreferenceOutcome",
    "RewardBreakdown",
    "RewardWeights",
    "critic_reward",
    "expert_accuracy",
    "expert_reward",
    "extract_options",
    "format_reward",
    "group_advantages",
    "improves_strictly",
    "length_reward",
    "multichoice_f1",
    "planner_reward",
    "preference_filter",
    "solver_reward",
    "write_preference_dataset",
]
