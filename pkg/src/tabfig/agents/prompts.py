"""Prompt template loading and deterministic rendering.

Templates live as text files with named placeholders; rendering is a
pure function of (instance, config, exemplars), so identical inputs
produce byte-identical prompts.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

WIDTH_SENTENCES = {
    "self_contained": "The analysis should rely solely on the given input, without referring to additional sources.",
    "internal": "The analysis should integrate the given input with references drawn from within the same source paper.",
    "external": "The analysis should integrate the given input with references drawn from sources outside the source paper.",
    "mixed": "The analysis should combine the given input with references drawn from both within and outside the source paper.",
}
DEPTH_SENTENCES = {
    "shallow": "The analysis should focus on surface-level observations and direct summarization of the input.",
    "in_depth": "The analysis should involve extended reasoning, deeper interpretation, and evidence-grounded inference beyond surface-level summarization.",
}


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    path = resources.files("tabfig.agents") / "templates" / f"{name}.txt"
    return path.read_text(encoding="utf-8")


def requirement_sentences(requirements: dict | None) -> str:
    """Optional length/width/depth expectations appended to the query."""
    if not requirements:
        return ""
    parts: list[str] = []
    if requirements.get("length_target"):
        parts.append(
            f"Please write the analysis in around {requirements['length_target']} tokens."
        )
    width = requirements.get("width")
    if width:
        parts.append(WIDTH_SENTENCES[width])
    depth = requirements.get("depth")
    if depth:
        parts.append(DEPTH_SENTENCES[depth])
    return " ".join(parts)


def render_exemplars(pool: list[dict], agent: str, k: int) -> str:
    """First k exemplar blocks for an agent, or empty when k = 0."""
    if k <= 0:
        return ""
    entries = [e for e in pool if e.get("agent") == agent][:k]
    blocks = []
    for i, entry in enumerate(entries, start=1):
        blocks.append(
            f"\n**Example {i}**\n\nProblem:\n{entry['problem']}\n\nResponse:\n{entry['response']}\n"
        )
    return "\n" + "".join(blocks) if blocks else ""


def task_problem_text(instance, requirements: dict | None = None) -> str:
    """The query plus the input data blocks (and requirement sentences)."""
    query = instance.query
    extra = requirement_sentences(requirements)
    if extra:
        query = f"{query} {extra}"
    data_blocks = "\n\n".join(
        f"[{el.kind}] {el.body.strip()}" for el in instance.inputs
    )
    return f"{query}\n\n{data_blocks}"


def task_context_text(instance) -> str:
    src = instance.source
    meta = (
        f"Paper: {src.get('title', '')} ({src.get('year', '')}, "
        f"{src.get('platform', '')}, {src.get('format', '')})"
    )
    context = src.get("context", "")
    return f"{meta}\n\n{context}" if context else meta


def data_type_noun(instance) -> str:
    label = instance.labels.get("data_type", "table")
    return "table/figure" if label == "mixed" else label


def render_planner(instance, config, exemplars: str = "") -> str:
    return load_template("planner").format(
        exemplars=exemplars,
        task_problem=task_problem_text(instance, config.requirements),
        task_context=task_context_text(instance),
        plan_limit=config.plan_limit,
    )


def render_expert(instance, config, plan_text: str, tool_info: str, turn_index: int, exemplars: str = "") -> str:
    return load_template("expert").format(
        exemplars=exemplars,
        task_problem=task_problem_text(instance, config.requirements),
        task_context=task_context_text(instance),
        planner_plan=plan_text,
        tool_info=tool_info,
        max_turns=config.max_expert_turns,
        turn_index=turn_index,
        summary_len=config.summary_len,
    )


def render_solver(instance, config, plan_text: str, knowledge_text: str, feedback: str | None, exemplars: str = "") -> str:
    context = task_context_text(instance)
    if knowledge_text:
        context = f"{context}\n\n**Knowledge Summary**\n\n{knowledge_text}"
    feedback_block = (
        f"\n**Critic Feedback On Your Previous Answer**\n\n{feedback}\n" if feedback else ""
    )
    return load_template("solver").format(
        exemplars=exemplars,
        task_problem=task_problem_text(instance, config.requirements),
        task_context=context,
        planner_plan=plan_text,
        feedback_block=feedback_block,
    )


def render_critic(instance, config, plan_text: str, solution: str, knowledge_text: str, exemplars: str = "") -> str:
    context = task_context_text(instance)
    if knowledge_text:
        context = f"{context}\n\n**Knowledge Summary**\n\n{knowledge_text}"
    return load_template("critic").format(
        exemplars=exemplars,
        task_problem=task_problem_text(instance, config.requirements),
        task_context=context,
        planner_plan=plan_text,
        solver_solution=solution,
        data_type=data_type_noun(instance),
        feedback_limit=config.feedback_limit,
    )


def render_judge(data_type: str, gt_analysis: str, model_analysis: str) -> str:
    return load_template("judge").format(
        data_type=data_type,
        gt_analysis=gt_analysis,
        model_analysis=model_analysis,
    )
