"""Instance construction: target data + context + gold analysis + labels.

The gold analysis of a target table/figure is the concatenation of the
paragraph elements that reference it at distance 1 in the reference
graph, in document order. Instances whose gold is missing or outside the
configured length band are rejected, as are targets embedded inside
another float.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..document.model import (
    DocElement,
    PaperDocument,
    ReferenceGraph,
    element_from_dict,
    element_to_dict,
)
from ..metrics.tokenize import token_count
from .context import ContextSet
from .filters import FilterDecision
from .thresholds import PipelineThresholds

DATA_TYPES = ("table", "figure", "mixed")
WIDTHS = ("self_contained", "internal", "external", "mixed")
DEPTHS = ("shallow", "in_depth", "unknown")
OBJECTIVES = ("methodology", "experiment", "unknown")


@dataclass
class AnalysisInstance:
    """One analysis task: inputs, source context, query, gold, labels."""

    instance_id: str
    inputs: list[DocElement]
    source: dict
    query: str
    gold: str
    labels: dict
    lengths: dict = field(default_factory=dict)
    gold_refs: list[str] = field(default_factory=list)

    @property
    def year(self) -> int:
        return int(self.source.get("year", 0))


def _serialize_context(doc: PaperDocument, ctx: ContextSet) -> str:
    """Flatten context levels into one text block, level by level."""
    chunks: list[str] = []
    order = {el.element_id: i for i, el in enumerate(doc.elements)}
    for depth, level in enumerate(ctx.levels, start=1):
        for eid in sorted(level, key=lambda e: order.get(e, len(order))):
            try:
                el = doc.element(eid)
            except KeyError:
                continue
            chunks.append(f"[context depth {depth}] ({el.kind}) {el.body.strip()}")
    return "\n\n".join(chunks)


def _is_embedded(doc: PaperDocument, target: DocElement) -> bool:
    s, e = target.span
    for other in doc.elements:
        if other.element_id == target.element_id:
            continue
        if other.kind in ("table", "figure"):
            os, oe = other.span
            if os <= s and e <= oe and (os, oe) != (s, e):
                return True
    return False


def default_query(target: DocElement) -> str:
    noun = "table" if target.kind == "table" else "figure"
    anchor = target.caption or target.label or target.element_id
    return (
        f"Write a scientific analysis of the {noun} described as: {anchor}. "
        "Interpret the presented data, integrate the surrounding context, "
        "and state the key findings."
    )


def build_instance(
    doc: PaperDocument,
    target: DocElement,
    ctx: ContextSet,
    thresholds: PipelineThresholds,
    graph: ReferenceGraph,
    query: str | None = None,
) -> AnalysisInstance | FilterDecision:
    """Construct an instance for ``target`` or reject with a reason."""
    if _is_embedded(doc, target):
        return FilterDecision(False, "embedded")

    order = {el.element_id: i for i, el in enumerate(doc.elements)}
    referrers = sorted(graph.referring(target.element_id), key=lambda e: order[e])
    gold_blocks = [doc.element(eid) for eid in referrers]
    gold_blocks = [el for el in gold_blocks if el.kind == "paragraph"]
    if not gold_blocks:
        return FilterDecision(False, "missing_gold")

    gold = "\n\n".join(el.body.strip() for el in gold_blocks)
    gold_len = token_count(gold)
    if gold_len < thresholds.min_gold_len:
        return FilterDecision(False, "too_short")
    if gold_len > thresholds.max_gold_len:
        return FilterDecision(False, "too_long")

    context_text = _serialize_context(doc, ctx)
    context_len = token_count(context_text)
    if context_len > thresholds.max_context_len:
        return FilterDecision(False, "context_too_long")

    inputs = [target]
    gold_refs: list[str] = []
    for el in gold_blocks:
        for ref in el.outgoing_refs:
            if ref not in gold_refs:
                gold_refs.append(ref)

    instance = AnalysisInstance(
        instance_id=f"{doc.paper_id}/{target.element_id}",
        inputs=inputs,
        source={
            "paper_id": doc.paper_id,
            "platform": doc.platform,
            "format": doc.format,
            "title": doc.title,
            "year": doc.year,
            "source_kind": doc.source_kind,
            "domains": [list(d) for d in doc.domains],
            "context": context_text,
        },
        query=query or default_query(target),
        gold=gold,
        labels={
            "data_type": target.kind,
            "format": doc.format,
            "source_kind": doc.source_kind,
            "domain": list(doc.domains[0]) if doc.domains else ["", ""],
            "width": "unknown",
            "depth": "unknown",
            "objective": "unknown",
        },
        lengths={
            "inputs": sum(token_count(el.body) for el in inputs),
            "context": context_len,
            "gold": gold_len,
        },
        gold_refs=gold_refs,
    )
    return instance


def instance_to_dict(inst: AnalysisInstance) -> dict:
    return {
        "instance_id": inst.instance_id,
        "inputs": [element_to_dict(el) for el in inst.inputs],
        "source": inst.source,
        "query": inst.query,
        "gold": inst.gold,
        "labels": inst.labels,
        "lengths": inst.lengths,
        "gold_refs": list(inst.gold_refs),
    }


def instance_from_dict(d: dict) -> AnalysisInstance:
    return AnalysisInstance(
        instance_id=d["instance_id"],
        inputs=[element_from_dict(e) for e in d["inputs"]],
        source=d["source"],
        query=d["query"],
        gold=d["gold"],
        labels=d["labels"],
        lengths=d.get("lengths", {}),
        gold_refs=list(d.get("gold_refs", [])),
    )


def write_instances(path, instances) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps(instance_to_dict(inst), ensure_ascii=False) + "\n")


def read_instances(path) -> list[AnalysisInstance]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(instance_from_dict(json.loads(line)))
    return out
