"""The four-stage agent state machine: plan, retrieve, solve, critique.

Turn accounting: one model turn per planner attempt, retrieval turn,
solve, or critique. A format-repair reprompt or the forced summary after
the last retrieval turn counts as a second message of the same turn, not
a new one, so the total turn count is bounded by the sum of the four
per-agent turn budgets. Every degradation path (unparseable plan, tool
errors, unparseable answers, critic failure) is recorded and the run
still produces a final analysis.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from ..errors import ContextOverflow, TagError
from ..gateway.backends import BackendSpec, ChatTurn, Gateway
from ..tools.registry import ToolCall, ToolEnv, ToolResult, invoke
from ..tools.specs import render_tool_info
from . import prompts
from .tags import extract_tag, parse_tags
from .toolcalls import parse_tool_call_text

log = logging.getLogger(__name__)

VARIANTS = ("baseline", "omnion", "symnion", "anagent", "anagent_critic")

GRADE_TAGS = ("accuracy", "completeness", "format", "writing", "faithfulness")

_FORMAT_REMINDER = (
    "\n\nREMINDER: your previous reply was not in the required format. "
    "Respond again using exactly the tagged sections requested above."
)
_FORCED_SUMMARY = (
    "\n\nYou have used all your turns. You MUST now stop and produce your "
    "**Knowledge Summary**, enclosed in <think>...</think><summary>...</summary>."
)


@dataclass
class PipelineConfig:
    """Per-run agent budgets, backends, and prompt knobs."""

    max_planner_turns: int = 1
    max_expert_turns: int = 5
    max_solver_turns: int = 2
    max_critic_turns: int = 1
    backends: dict[str, BackendSpec] = field(default_factory=dict)
    variant: str = "anagent_critic"
    k_shot: int = 0
    exemplar_pool: list[dict] = field(default_factory=list)
    requirements: dict | None = None
    plan_limit: int = 500
    summary_len: int = 1500
    feedback_limit: int = 1000
    tool_names: list[str] | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        for name in ("max_planner_turns", "max_expert_turns", "max_solver_turns", "max_critic_turns"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def has_planner(self) -> bool:
        return self.variant in ("anagent", "anagent_critic") and self.max_planner_turns > 0

    @property
    def has_expert(self) -> bool:
        return self.variant in ("symnion", "anagent", "anagent_critic") and self.max_expert_turns > 0

    @property
    def has_critic(self) -> bool:
        return self.variant == "anagent_critic" and self.max_critic_turns > 0

    @property
    def solver_has_tools(self) -> bool:
        return self.variant == "omnion"

    @property
    def turn_budget(self) -> int:
        return (
            (self.max_planner_turns if self.has_planner else 0)
            + (self.max_expert_turns if self.has_expert or self.solver_has_tools else 0)
            + self.max_solver_turns
            + (self.max_critic_turns if self.has_critic else 0)
        )

    def backend_for(self, agent: str) -> BackendSpec:
        if agent in self.backends:
            return self.backends[agent]
        if "default" in self.backends:
            return self.backends["default"]
        raise KeyError(f"no backend configured for agent {agent!r}")


@dataclass
class Plan:
    subtasks: list[str]
    raw_think: str = ""

    def as_text(self) -> str:
        return "\n".join(f"* {s}" for s in self.subtasks)


@dataclass
class KnowledgeEntry:
    turn: int
    source: str  # tool name or "summary"
    content: str
    is_error: bool = False


@dataclass
class KnowledgeBase:
    """Monotone store of retrieved knowledge across retrieval turns."""

    entries: list[KnowledgeEntry] = field(default_factory=list)
    summary: str | None = None

    def add(self, turn: int, source: str, content: str, is_error: bool = False) -> None:
        self.entries.append(KnowledgeEntry(turn, source, content, is_error))

    def snapshot(self) -> tuple[int, ...]:
        return tuple(id(e) for e in self.entries)

    def as_text(self, limit: int | None = None) -> str:
        if self.summary:
            return self.summary
        parts = [f"[{e.source}{' / error' if e.is_error else ''}] {e.content}" for e in self.entries]
        text = "\n\n".join(parts)
        return text[:limit] if limit else text


@dataclass
class CritiqueReport:
    grades: dict[str, int]
    feedback: str
    raw_think: str = ""
    clamped: bool = False

    def perfect(self) -> bool:
        return all(g == 2 for g in self.grades.values())


@dataclass
class ExpertTurnRecord:
    turn_index: int
    text: str
    tool_call: ToolCall | None = None
    tool_result: ToolResult | None = None
    summary: str | None = None
    error: str | None = None


@dataclass
class AgentTranscript:
    """Full record of one pipeline run."""

    instance_id: str
    variant: str
    plan: Plan | None = None
    expert_turns: list[ExpertTurnRecord] = field(default_factory=list)
    knowledge: KnowledgeBase = field(default_factory=KnowledgeBase)
    solutions: list[str] = field(default_factory=list)
    critiques: list[CritiqueReport] = field(default_factory=list)
    final: str = ""
    model_call_count: int = 0
    request_count: int = 0
    retry_count: int = 0
    knowledge_sizes: list[int] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "variant": self.variant,
            "plan": (
                {"subtasks": self.plan.subtasks, "raw_think": self.plan.raw_think}
                if self.plan
                else None
            ),
            "expert_turns": [
                {
                    "turn_index": t.turn_index,
                    "text": t.text,
                    "tool_call": (
                        {"tool_name": t.tool_call.tool_name, "params": t.tool_call.params}
                        if t.tool_call
                        else None
                    ),
                    "tool_result": (
                        {
                            "status": t.tool_result.status,
                            "payload": t.tool_result.payload,
                            "error_kind": t.tool_result.error_kind,
                        }
                        if t.tool_result
                        else None
                    ),
                    "summary": t.summary,
                    "error": t.error,
                }
                for t in self.expert_turns
            ],
            "knowledge": {
                "entries": [
                    {
                        "turn": e.turn,
                        "source": e.source,
                        "content": e.content,
                        "is_error": e.is_error,
                    }
                    for e in self.knowledge.entries
                ],
                "summary": self.knowledge.summary,
            },
            "solutions": self.solutions,
            "critiques": [
                {
                    "grades": c.grades,
                    "feedback": c.feedback,
                    "raw_think": c.raw_think,
                    "clamped": c.clamped,
                }
                for c in self.critiques
            ],
            "final": self.final,
            "model_call_count": self.model_call_count,
            "request_count": self.request_count,
            "retry_count": self.retry_count,
            "knowledge_sizes": self.knowledge_sizes,
            "flags": self.flags,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)


class PipelineRunner:
    """Runs instances through the configured agent pipeline."""

    def __init__(self, config: PipelineConfig, gateway: Gateway, tool_env: ToolEnv | None = None):
        self.config = config
        self.gateway = gateway
        self.tool_env = tool_env or ToolEnv()

    # -- low-level call helpers ------------------------------------------

    def _chat(self, transcript: AgentTranscript, agent: str, prompt: str) -> str:
        backend = self.config.backend_for(agent)
        for shrink in (1.0, 0.5, 0.25):
            try:
                reply = self.gateway.chat(
                    backend, [ChatTurn(role="user", content=self._shrunk(prompt, shrink))]
                )
            except ContextOverflow:
                transcript.request_count += 1
                transcript.flags.append(f"{agent}_context_truncated")
                continue
            transcript.request_count += 1
            transcript.retry_count += reply.retries
            return reply.text
        raise ContextOverflow(f"prompt for {agent} still overflows at quarter size")

    @staticmethod
    def _shrunk(prompt: str, scale: float) -> str:
        if scale >= 1.0:
            return prompt
        keep = int(len(prompt) * scale)
        head, tail = int(keep * 0.75), keep - int(keep * 0.75)
        return prompt[:head] + "\n[...context truncated...]\n" + prompt[-tail:]

    def _exemplars(self, agent: str) -> str:
        return prompts.render_exemplars(self.config.exemplar_pool, agent, self.config.k_shot)

    # -- stages -----------------------------------------------------------

    def _plan_stage(self, instance, transcript: AgentTranscript) -> Plan:
        cfg = self.config
        prompt = prompts.render_planner(instance, cfg, exemplars=self._exemplars("planner"))
        for _ in range(cfg.max_planner_turns):
            transcript.model_call_count += 1
            text = self._chat(transcript, "planner", prompt)
            try:
                tags = parse_tags(text, ["think", "plan"])
            except TagError:
                text = self._chat(transcript, "planner", prompt + _FORMAT_REMINDER)
                try:
                    tags = parse_tags(text, ["think", "plan"])
                except TagError:
                    continue
            subtasks = [
                line.lstrip("* ").strip()
                for line in tags["plan"].splitlines()
                if line.strip().startswith("*")
            ]
            subtasks = [s for s in subtasks if s] or [tags["plan"].strip() or ""]
            return Plan(subtasks=subtasks, raw_think=tags["think"])
        transcript.flags.append("plan_failure")
        log.warning("plan stage failed for %s; degrading to empty plan", instance.instance_id)
        return Plan(subtasks=[""], raw_think="")

    @staticmethod
    def _parse_tool_call(text: str, turn_index: int) -> ToolCall | None:
        try:
            return parse_tool_call_text(text, turn_index)
        except TagError:
            return None

    def _retrieval_stage(self, instance, transcript: AgentTranscript, plan_text: str, agent: str) -> None:
        cfg = self.config
        tool_info = render_tool_info(cfg.tool_names)
        knowledge = transcript.knowledge
        for turn in range(1, cfg.max_expert_turns + 1):
            transcript.model_call_count += 1
            prompt = prompts.render_expert(
                instance, cfg, plan_text, tool_info, turn, exemplars=self._exemplars(agent)
            )
            if knowledge.entries:
                prompt += "\n\n**Collected So Far**\n\n" + knowledge.as_text(limit=4000)
            text = self._chat(transcript, agent, prompt)
            record = ExpertTurnRecord(turn_index=turn, text=text)

            summary = self._try_summary(text)
            call = None if summary is not None else self._parse_tool_call(text, turn)
            if summary is None and call is None:
                # one format-repair message within the same turn
                text = self._chat(transcript, agent, prompt + _FORMAT_REMINDER)
                record.text = text
                summary = self._try_summary(text)
                call = None if summary is not None else self._parse_tool_call(text, turn)

            if summary is not None:
                record.summary = summary
                knowledge.add(turn, "summary", summary)
                knowledge.summary = summary
                transcript.expert_turns.append(record)
                transcript.knowledge_sizes.append(len(knowledge.entries))
                return
            if call is not None:
                result = invoke(call, self.tool_env)
                record.tool_call, record.tool_result = call, result
                knowledge.add(
                    turn,
                    call.tool_name,
                    result.payload if result.status == "ok" else f"{result.error_kind}: {result.payload}",
                    is_error=result.status == "error",
                )
            else:
                record.error = "unparseable"
                knowledge.add(turn, "unparseable", text, is_error=True)
                transcript.flags.append(f"{agent}_turn_{turn}_unparseable")
            transcript.expert_turns.append(record)
            transcript.knowledge_sizes.append(len(knowledge.entries))

        # turns exhausted without a summary: force one as a second message
        # of the final turn (no extra turn consumed)
        prompt = prompts.render_expert(
            instance,
            cfg,
            plan_text,
            tool_info,
            cfg.max_expert_turns,
            exemplars=self._exemplars(agent),
        )
        prompt += "\n\n**Collected So Far**\n\n" + knowledge.as_text(limit=4000) + _FORCED_SUMMARY
        text = self._chat(transcript, agent, prompt)
        summary = self._try_summary(text)
        if summary is None:
            summary = text.strip()
            transcript.flags.append("forced_summary_unparsed")
        knowledge.add(cfg.max_expert_turns, "summary", summary)
        knowledge.summary = summary
        if transcript.expert_turns:
            transcript.expert_turns[-1].summary = summary
        transcript.knowledge_sizes.append(len(knowledge.entries))

    @staticmethod
    def _try_summary(text: str) -> str | None:
        try:
            return extract_tag(text, "summary")
        except TagError:
            return None

    def _solve_once(self, instance, transcript: AgentTranscript, plan_text: str, feedback: str | None) -> str:
        cfg = self.config
        transcript.model_call_count += 1
        knowledge_text = transcript.knowledge.as_text(limit=6000)
        prompt = prompts.render_solver(
            instance, cfg, plan_text, knowledge_text, feedback, exemplars=self._exemplars("solver")
        )
        text = self._chat(transcript, "solver", prompt)
        answer = self._try_answer(text)
        if answer is None:
            text = self._chat(transcript, "solver", prompt + _FORMAT_REMINDER)
            answer = self._try_answer(text)
        if answer is None:
            transcript.flags.append("solution_unparsed")
            answer = text.strip()
        return answer

    @staticmethod
    def _try_answer(text: str) -> str | None:
        try:
            return extract_tag(text, "answer")
        except TagError:
            return None

    def _critique_once(self, instance, transcript: AgentTranscript, plan_text: str, solution: str) -> CritiqueReport | None:
        cfg = self.config
        transcript.model_call_count += 1
        knowledge_text = transcript.knowledge.as_text(limit=6000)
        prompt = prompts.render_critic(
            instance, cfg, plan_text, solution, knowledge_text, exemplars=self._exemplars("critic")
        )
        text = self._chat(transcript, "critic", prompt)
        report = self._parse_critique(text)
        if report is None:
            text = self._chat(transcript, "critic", prompt + _FORMAT_REMINDER)
            report = self._parse_critique(text)
        if report is None:
            transcript.flags.append("critique_failure")
        return report

    def _parse_critique(self, text: str) -> CritiqueReport | None:
        try:
            tags = parse_tags(text, list(GRADE_TAGS) + ["feedback"])
        except TagError:
            return None
        grades: dict[str, int] = {}
        clamped = False
        for name in GRADE_TAGS:
            value = _first_int(tags[name])
            if value is None:
                return None
            if value < 0 or value > 2:
                clamped = True
                value = min(max(value, 0), 2)
            grades[name] = value
        feedback = tags["feedback"].strip()[: self.config.feedback_limit]
        think = ""
        try:
            think = extract_tag(text, "think") or ""
        except TagError:
            pass
        return CritiqueReport(grades=grades, feedback=feedback, raw_think=think, clamped=clamped)

    # -- entry point -------------------------------------------------------

    def run(self, instance) -> AgentTranscript:
        cfg = self.config
        transcript = AgentTranscript(instance_id=instance.instance_id, variant=cfg.variant)

        plan_text = "(no plan)"
        if cfg.has_planner:
            transcript.plan = self._plan_stage(instance, transcript)
            plan_text = transcript.plan.as_text()

        if cfg.has_expert:
            self._retrieval_stage(instance, transcript, plan_text, agent="expert")
        elif cfg.solver_has_tools and cfg.max_expert_turns > 0:
            self._retrieval_stage(instance, transcript, plan_text, agent="solver")

        feedback: str | None = None
        for i in range(1, cfg.max_solver_turns + 1):
            solution = self._solve_once(instance, transcript, plan_text, feedback)
            transcript.solutions.append(solution)
            if i == cfg.max_solver_turns:
                break
            if not cfg.has_critic or len(transcript.critiques) >= cfg.max_critic_turns:
                break
            report = self._critique_once(instance, transcript, plan_text, solution)
            if report is None:
                break  # refinement skipped, current solution stands
            transcript.critiques.append(report)
            if report.perfect():
                break  # nothing left to refine
            feedback = report.feedback

        transcript.final = transcript.solutions[-1] if transcript.solutions else ""
        assert transcript.model_call_count <= cfg.turn_budget, (
            transcript.model_call_count,
            cfg.turn_budget,
        )
        return transcript


def _first_int(text: str):
    import re

    m = re.search(r"-?\d+", text)
    return int(m.group(0)) if m else None


def run_pipeline(instance, config: PipelineConfig, gateway: Gateway, tool_env: ToolEnv | None = None) -> AgentTranscript:
    """Run one instance through the pipeline and return its transcript."""
    return PipelineRunner(config, gateway, tool_env).run(instance)
