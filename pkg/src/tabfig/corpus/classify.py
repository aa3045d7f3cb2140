"""Seven-dimension task labels: rule-based where possible, judged otherwise.

Five label dimensions (data type, format, source kind, domain, width) are
decidable from the instance itself. Analysis depth and objective need a
judgment call, so they go through a constrained-choice prompt against a
chat backend; responses that stay unparseable after one retry yield the
explicit ``unknown`` label instead of dropping the instance.
"""

from __future__ import annotations

import logging

from ..document.model import PaperDocument
from .build import AnalysisInstance

log = logging.getLogger(__name__)

_DEPTH_CHOICES = ("shallow", "in_depth")
_OBJECTIVE_CHOICES = ("methodology", "experiment")

_CLASSIFY_PROMPT = """\
You label scientific analysis tasks.

Analysis text:
{gold}

Question: {question}
Answer with exactly one token from: {choices}."""


def classify_width(instance: AnalysisInstance, doc: PaperDocument) -> str:
    """Reference-scope label from the gold analysis' recorded references.

    References to the instance's own inputs are evidence of using the
    given input, not of wider scope, so they are excluded. References
    resolving to bibliography entries or to nothing inside the document
    count as external; everything else in-document counts as internal.
    """
    input_ids = {el.element_id for el in instance.inputs}
    input_labels = {el.label for el in instance.inputs if el.label}
    by_label = {el.label: el for el in doc.elements if el.label}
    ids = doc.element_ids

    internal = external = 0
    for ref in instance.gold_refs:
        if ref in input_ids or ref in input_labels:
            continue
        el = doc.element(ref) if ref in ids else by_label.get(ref)
        if el is None or el.kind == "bib_entry":
            external += 1
        else:
            internal += 1
    if internal == 0 and external == 0:
        return "self_contained"
    if external == 0:
        return "internal"
    if internal == 0:
        return "external"
    return "mixed"


def classify_rule(instance: AnalysisInstance, doc: PaperDocument) -> dict:
    """Fill the five rule-decidable labels in place and return them."""
    kinds = {el.kind for el in instance.inputs}
    if kinds == {"table"}:
        data_type = "table"
    elif kinds == {"figure"}:
        data_type = "figure"
    else:
        data_type = "mixed"
    instance.labels.update(
        {
            "data_type": data_type,
            "format": doc.format,
            "source_kind": doc.source_kind,
            "domain": list(doc.domains[0]) if doc.domains else ["", ""],
            "width": classify_width(instance, doc),
        }
    )
    return instance.labels


def _ask_choice(gateway, backend, gold: str, question: str, choices: tuple[str, ...]) -> str:
    from ..gateway.backends import ChatTurn

    prompt = _CLASSIFY_PROMPT.format(
        gold=gold, question=question, choices=", ".join(choices)
    )
    for attempt in range(2):
        reply = gateway.chat(backend, [ChatTurn(role="user", content=prompt)]).text
        normalized = reply.lower().replace("-", "_")
        for choice in choices:
            if choice in normalized:
                return choice
        log.debug("unparseable classification reply (attempt %d): %r", attempt + 1, reply)
    return "unknown"


def classify_mllm(instance: AnalysisInstance, gateway, backend) -> dict:
    """Assign depth and objective labels via a constrained-choice prompt."""
    depth = _ask_choice(
        gateway,
        backend,
        instance.gold,
        "Is this analysis a shallow restatement of the input, or an in_depth "
        "analysis with inference beyond it?",
        _DEPTH_CHOICES,
    )
    objective = _ask_choice(
        gateway,
        backend,
        instance.gold,
        "Does this analysis describe methodology, or interpret experiment results?",
        _OBJECTIVE_CHOICES,
    )
    instance.labels["depth"] = depth
    instance.labels["objective"] = objective
    return instance.labels
