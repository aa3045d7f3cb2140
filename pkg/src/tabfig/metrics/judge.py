"""Five-dimensional judge grading over generated analyses.

Each instance is graded 0-2 on accuracy, completeness, format, writing,
and faithfulness by a chat backend; a dimension percentage is
100 * mean(grade) / 2 and the overall judge score is the mean of the
five dimension percentages. Instances whose grades stay unparseable
after one retry are excluded and counted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..agents.prompts import render_judge
from ..agents.tags import parse_tags
from ..errors import JudgeUnparseable, TagError

DIMENSIONS = ("accuracy", "completeness", "format", "writing", "faithfulness")

_RETRY_SUFFIX = (
    "\n\nREMINDER: reply with all five grade tags "
    "(<accuracy>, <completeness>, <format>, <writing>, <faithfulness>), "
    "each containing a single integer from 0 to 2."
)


@dataclass
class JudgeReport:
    per_instance: dict[str, dict[str, int]] = field(default_factory=dict)
    excluded: list[str] = field(default_factory=list)
    clamped: list[str] = field(default_factory=list)

    @property
    def dimension_pct(self) -> dict[str, float]:
        if not self.per_instance:
            return {d: 0.0 for d in DIMENSIONS}
        out = {}
        for d in DIMENSIONS:
            grades = [g[d] for g in self.per_instance.values()]
            out[d] = 100.0 * (sum(grades) / len(grades)) / 2.0
        return out

    @property
    def s_mllm(self) -> float:
        pct = self.dimension_pct
        return sum(pct.values()) / len(DIMENSIONS)

    def as_dict(self) -> dict:
        pct = self.dimension_pct
        return {
            "per_instance": self.per_instance,
            "excluded": self.excluded,
            "clamped": self.clamped,
            "dimensions": {
                "s_acc": pct["accuracy"],
                "s_complete": pct["completeness"],
                "s_format": pct["format"],
                "s_clarity": pct["writing"],
                "s_faith": pct["faithfulness"],
            },
            "s_mllm": self.s_mllm,
        }


def _parse_grades(text: str) -> tuple[dict[str, int], bool]:
    tags = parse_tags(text, list(DIMENSIONS))
    grades: dict[str, int] = {}
    clamped = False
    for dim in DIMENSIONS:
        m = re.search(r"-?\d+", tags[dim])
        if m is None:
            raise TagError("missing", dim)
        value = int(m.group(0))
        if value < 0 or value > 2:
            clamped = True
            value = min(max(value, 0), 2)
        grades[dim] = value
    return grades, clamped


def judge_five_dim(instance, generated: str, gateway, backend) -> tuple[dict[str, int], bool]:
    """Grade one analysis; returns (grades, clamped_flag).

    Raises JudgeUnparseable when no usable grades survive one retry.
    """
    from ..gateway.backends import ChatTurn

    data_type = instance.labels.get("data_type", "table")
    if data_type == "mixed":
        data_type = "table/figure"
    prompt = render_judge(data_type, instance.gold, generated)
    for attempt in range(2):
        text = gateway.chat(
            backend, [ChatTurn(role="user", content=prompt if attempt == 0 else prompt + _RETRY_SUFFIX)]
        ).text
        try:
            return _parse_grades(text)
        except TagError:
            continue
    raise JudgeUnparseable(instance.instance_id)


def judge_corpus(instances, generated: dict[str, str], gateway, backend) -> JudgeReport:
    """Grade a corpus of generated analyses keyed by instance id."""
    report = JudgeReport()
    for inst in instances:
        text = generated.get(inst.instance_id)
        if text is None:
            report.excluded.append(inst.instance_id)
            continue
        try:
            grades, clamped = judge_five_dim(inst, text, gateway, backend)
        except JudgeUnparseable:
            report.excluded.append(inst.instance_id)
            continue
        report.per_instance[inst.instance_id] = grades
        if clamped:
            report.clamped.append(inst.instance_id)
    return report
