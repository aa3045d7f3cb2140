"""Scripted-backend scenario machinery for pipeline tests.

Builds stage-aware reply scripts with controllable failure behaviors so
the orchestrator can be driven through happy paths, tag failures, tool
failures, and turn exhaustion, fully offline.
"""

from __future__ import annotations

import random

from tabfig.agents.orchestrator import PipelineConfig
from tabfig.gateway.backends import BackendSpec, Gateway

FEEDBACK_TEXT = "Tighten the comparison against the baseline and cite the table."

EXPERT_REPLIES = {
    "tool": (
        "<think>need the table context</think><tool>information_localizer</tool>"
        "<query>Reconstruction error</query><paper_id>sample1</paper_id>"
    ),
    "tool_error": "<think>search the web</think><tool>web_searcher</tool><query>latest results</query>",
    "bad_params": (
        "<think>search arxiv</think><tool>arxiv_searcher</tool>"
        "<query>graph filters</query><max_results>five</max_results>"
    ),
    "unknown_tool": "<think>try something odd</think><tool>time_machine</tool>",
    "garbage": "I will just ramble without any tags at all.",
    "summary": "<think>enough gathered</think><summary>collected knowledge summary</summary>",
}

CRITIC_REPLIES = {
    "perfect": (
        "<think>flawless</think><accuracy>2</accuracy><completeness>2</completeness>"
        "<format>2</format><writing>2</writing><faithfulness>2</faithfulness>"
        "<feedback>No changes needed.</feedback>"
    ),
    "feedback": (
        "<think>gaps found</think><accuracy>2</accuracy><completeness>1</completeness>"
        "<format>2</format><writing>2</writing><faithfulness>1</faithfulness>"
        f"<feedback>{FEEDBACK_TEXT}</feedback>"
    ),
    "clamp": (
        "<think>overshoot</think><accuracy>3</accuracy><completeness>2</completeness>"
        "<format>2</format><writing>2</writing><faithfulness>2</faithfulness>"
        "<feedback>Scale confusion.</feedback>"
    ),
    "garbage": "no grades from me",
}


def make_script(
    plan: str = "ok",
    expert: tuple[str, ...] = ("tool", "summary"),
    solver: tuple[str, ...] = ("ok",),
    critic: tuple[str, ...] = ("perfect",),
    forced_summary: str = "ok",
):
    """Reply script keyed off each stage's prompt preamble.

    The expert/solver/critic tuples are consumed one reply per request
    (repair reprompts consume the next entry too); the last entry
    repeats once a tuple runs out.
    """
    state = {"expert": 0, "solver": 0, "critic": 0}

    def take(kind: str, behaviors: tuple[str, ...]) -> str:
        i = state[kind]
        state[kind] += 1
        return behaviors[min(i, len(behaviors) - 1)]

    def script(turns, params) -> str:
        prompt = turns[-1].content
        head = prompt[:400]
        if "Task Planning agent" in head:
            if plan == "ok":
                return (
                    "<think>decompose</think>"
                    "<plan>* gather context\n* interpret data\n* draft analysis</plan>"
                )
            if plan == "unbalanced":
                return "<think>decompose</think><plan>* gather context"
            return "<think>decompose</think> (forgot the plan tag)"
        if "Expert Scientist equipped with various tools" in head:
            if "You MUST now stop" in prompt:
                if forced_summary == "ok":
                    return "<think>stopping</think><summary>forced summary of findings</summary>"
                return "raw unparseable forced reply"
            return EXPERT_REPLIES[take("expert", expert)]
        if "writes high-quality scientific analysis" in head:
            behavior = take("solver", solver)
            if behavior == "ok":
                return (
                    f"<think>synthesize</think><answer>analysis draft v{state['solver']}: "
                    "the truncated filter dominates across families.</answer>"
                )
            return "rambling answer with no enclosure"
        if "CRITIC ADVISOR" in head:
            return CRITIC_REPLIES[take("critic", critic)]
        raise AssertionError(f"unrecognized stage prompt: {head[:80]}")

    return script


def scripted_pipeline(script, variant: str = "anagent_critic", **config_kw):
    gateway = Gateway(backoff_base=0.0)
    gateway.register_script("default", script)
    backend = BackendSpec(name="default", endpoint="mock://chat", model_id="scripted")
    config = PipelineConfig(backends={"default": backend}, variant=variant, **config_kw)
    return config, gateway


def scenario_matrix(count: int = 50, seed: int = 20240) -> list[dict]:
    """Deterministic scenario mix covering variants and failure modes."""
    rng = random.Random(seed)
    variants = ("baseline", "omnion", "symnion", "anagent", "anagent_critic")
    plans = ("ok", "ok", "missing", "unbalanced")
    experts = (
        ("tool", "summary"),
        ("summary",),
        ("tool", "tool", "tool", "tool", "tool"),  # turn exhaustion
        ("garbage", "garbage", "summary"),
        ("bad_params", "summary"),
        ("unknown_tool", "summary"),
        ("tool_error", "summary"),
    )
    solvers = (("ok",), ("garbage", "ok"), ("garbage", "garbage"))
    critics = (("perfect",), ("feedback",), ("clamp",), ("garbage", "garbage"))

    scenarios = []
    for variant in variants:  # every variant appears at least once
        scenarios.append(
            {
                "variant": variant,
                "plan": "ok",
                "expert": ("tool", "summary"),
                "solver": ("ok",),
                "critic": ("feedback",),
                "forced_summary": "ok",
            }
        )
    while len(scenarios) < count:
        scenarios.append(
            {
                "variant": rng.choice(variants),
                "plan": rng.choice(plans),
                "expert": rng.choice(experts),
                "solver": rng.choice(solvers),
                "critic": rng.choice(critics),
                "forced_summary": rng.choice(("ok", "raw")),
            }
        )
    return scenarios
