"""Individual reward components shared by the per-agent reward functions.

Every component maps into [0, 1]. Format rewards check the agent's
required tag set; selection accuracy uses set F1 with an exact-equality
fast path; tool accuracy gates parameter correctness on picking the
right tool at all; the length reward is an inclusive band indicator at
half and one-and-a-half times the reference length.
"""

from __future__ import annotations

import re

from ..agents.tags import extract_tag, has_tags
from ..errors import EmptyGold, EmptyReference, TagError
from ..metrics.tokenize import token_count
from ..tools.registry import ToolCall
from ..tools.specs import TOOL_SPECS

AGENT_TAGS = {
    "planner": ["think", "plan"],
    "solver": ["think", "answer"],
    "critic": ["think", "accuracy", "completeness", "format", "writing", "faithfulness", "feedback"],
}

_OPTION = re.compile(r"\b([A-Z]|\d+)\b")


def format_reward(z: str, agent: str) -> int:
    """1 iff the agent's required tag set parses cleanly, else 0."""
    if agent == "expert":
        # a retrieval turn is well-formed with either a tool call or a summary
        if not has_tags(z, ["think"]):
            return 0
        try:
            has_tool = extract_tag(z, "tool") is not None
            has_summary = extract_tag(z, "summary") is not None
        except TagError:
            return 0
        return 1 if (has_tool or has_summary) else 0
    required = AGENT_TAGS.get(agent)
    if required is None:
        raise ValueError(f"unknown agent {agent!r}")
    return 1 if has_tags(z, required) else 0


def multichoice_f1(pred: set[str], gold: set[str]) -> float:
    """1 on exact set equality, else F1 of the selected option sets."""
    gold = set(gold)
    if not gold:
        raise EmptyGold("gold option set is empty")
    pred = set(pred)
    if pred == gold:
        return 1.0
    if not pred:
        return 0.0
    intersection = len(pred & gold)
    precision = intersection / len(pred)
    recall = intersection / len(gold)
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def extract_options(text: str, tag: str) -> set[str] | None:
    """Option identifiers (letters or numbers) from one tagged section."""
    try:
        content = extract_tag(text, tag)
    except TagError:
        return None
    if content is None:
        return None
    return set(_OPTION.findall(content))


def _params_match(value, gold_value, param_type: str) -> bool:
    if param_type in ("string",):
        if isinstance(value, str) and isinstance(gold_value, str):
            norm = lambda s: re.sub(r"\s+", " ", s).strip().casefold()
            return norm(value) == norm(gold_value)
    return value == gold_value


def expert_accuracy(call: ToolCall, gold: ToolCall) -> float:
    """Tool-selection indicator times the matched-gold-parameter fraction.

    A wrong tool scores 0 regardless of parameters. With the right tool,
    enum/numeric/id parameters must match exactly and free-text queries
    match after whitespace and case normalization.
    """
    if call.tool_name != gold.tool_name:
        return 0.0
    if not gold.params:
        return 1.0
    spec = TOOL_SPECS.get(gold.tool_name)
    matched = 0
    for pname, gold_value in gold.params.items():
        if pname not in call.params:
            continue
        ptype = spec.param_schema[pname].type if spec and pname in spec.param_schema else "string"
        if _params_match(call.params[pname], gold_value, ptype):
            matched += 1
    return matched / len(gold.params)


def length_reward(z: str, z_ref: str) -> int:
    """1 iff len(z) lies inclusively within [0.5, 1.5] x len(z_ref) tokens."""
    ref_len = token_count(z_ref)
    if ref_len == 0:
        raise EmptyReference("reference text has no tokens")
    n = token_count(z)
    return 1 if 0.5 * ref_len <= n <= 1.5 * ref_len else 0
