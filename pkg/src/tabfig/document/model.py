"""Data model for parsed papers: typed elements plus a cross-reference graph.

A parsed paper is an ordered list of :class:`DocElement` objects covering
tables, figures, sections, equations, bibliography entries, and prose
paragraphs. Elements carry character spans into the raw source and record
outgoing references (resolved element ids or external citation keys), from
which :func:`build_reference_graph` derives the bidirectional reference
graph used for context retrieval.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from ..errors import NotFound

ELEMENT_KINDS = (
    "section",
    "table",
    "figure",
    "equation",
    "caption",
    "citation",
    "bib_entry",
    "paragraph",
)

PLATFORMS = ("arxiv", "pubmed", "other")
FORMATS = ("latex", "xml")
SOURCE_KINDS = ("general", "review_survey")


@dataclass
class DocElement:
    """One typed unit of a parsed paper, with markup preserved verbatim."""

    element_id: str
    kind: str
    body: str
    label: str | None = None
    caption: str | None = None
    image_ref: str | None = None
    outgoing_refs: list[str] = field(default_factory=list)
    span: tuple[int, int] = (0, 0)

    def searchable_text(self) -> str:
        """Caption, label, and body joined for substring lookup."""
        parts = [self.caption or "", self.label or "", self.body]
        return "\n".join(parts)


@dataclass
class PaperDocument:
    """A parsed paper: metadata plus ordered elements over the raw source."""

    paper_id: str
    platform: str
    format: str
    title: str
    year: int
    source_kind: str
    domains: list[tuple[str, str]]
    elements: list[DocElement]
    raw: str

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}")
        if self.platform not in PLATFORMS:
            raise ValueError(f"unknown platform {self.platform!r}")
        if self.year < 1900:
            raise ValueError(f"implausible year {self.year}")
        seen = set()
        for el in self.elements:
            if el.element_id in seen:
                raise ValueError(f"duplicate element id {el.element_id!r}")
            seen.add(el.element_id)

    def element(self, element_id: str) -> DocElement:
        for el in self.elements:
            if el.element_id == element_id:
                return el
        raise KeyError(element_id)

    def by_kind(self, kind: str) -> list[DocElement]:
        return [el for el in self.elements if el.kind == kind]

    @property
    def element_ids(self) -> set[str]:
        return {el.element_id for el in self.elements}


@dataclass
class ReferenceGraph:
    """Reference adjacency over element ids.

    ``out_edges[u]`` holds elements u refers to; ``in_edges[v]`` holds
    elements referring to v. The two maps are mutually consistent
    transposes by construction.
    """

    nodes: set[str]
    out_edges: dict[str, set[str]]
    in_edges: dict[str, set[str]]

    def referring(self, element_id: str) -> set[str]:
        """Elements whose bodies reference ``element_id``."""
        return self.in_edges.get(element_id, set())

    def referred(self, element_id: str) -> set[str]:
        """Elements that ``element_id`` references."""
        return self.out_edges.get(element_id, set())

    def neighbors(self, element_id: str) -> set[str]:
        return self.referring(element_id) | self.referred(element_id)


def build_reference_graph(doc: PaperDocument) -> ReferenceGraph:
    """Derive the reference graph from element ``outgoing_refs``.

    An edge u -> v exists iff u's recorded references name v's label or
    element id. Dangling references (external citation keys with no
    matching element) stay on the element and produce no edge.
    """
    by_label: dict[str, str] = {}
    for el in doc.elements:
        if el.label:
            by_label.setdefault(el.label, el.element_id)
    ids = doc.element_ids

    nodes = set(ids)
    out_edges: dict[str, set[str]] = {eid: set() for eid in nodes}
    in_edges: dict[str, set[str]] = {eid: set() for eid in nodes}
    for el in doc.elements:
        for ref in el.outgoing_refs:
            target = ref if ref in ids else by_label.get(ref)
            if target is None or target == el.element_id:
                continue
            out_edges[el.element_id].add(target)
            in_edges[target].add(el.element_id)
    return ReferenceGraph(nodes=nodes, out_edges=out_edges, in_edges=in_edges)


_WS = re.compile(r"\s+")


def _normalize_ws(text: str) -> str:
    return _WS.sub(" ", text).strip()


def locate_element(doc: PaperDocument, query: str) -> list[DocElement]:
    """Find elements containing ``query`` in caption, label, or body.

    Matching is exact substring after whitespace normalization. Results
    are ranked by match position, ties broken by document order. An empty
    result list is a value, not an error.
    """
    if not isinstance(doc, PaperDocument):
        raise NotFound("invalid document handle")
    if not query:
        raise ValueError("query must be non-empty")
    needle = _normalize_ws(query)
    hits: list[tuple[int, int, DocElement]] = []
    for order, el in enumerate(doc.elements):
        haystack = _normalize_ws(el.searchable_text())
        pos = haystack.find(needle)
        if pos >= 0:
            hits.append((pos, order, el))
    hits.sort(key=lambda h: (h[0], h[1]))
    return [el for _, _, el in hits]


def element_to_dict(el: DocElement) -> dict:
    return {
        "element_id": el.element_id,
        "kind": el.kind,
        "label": el.label,
        "caption": el.caption,
        "body": el.body,
        "image_ref": el.image_ref,
        "outgoing_refs": list(el.outgoing_refs),
        "span": list(el.span),
    }


def element_from_dict(d: dict) -> DocElement:
    return DocElement(
        element_id=d["element_id"],
        kind=d["kind"],
        body=d["body"],
        label=d.get("label"),
        caption=d.get("caption"),
        image_ref=d.get("image_ref"),
        outgoing_refs=list(d.get("outgoing_refs", [])),
        span=tuple(d.get("span", (0, 0))),
    )


def document_to_json(doc: PaperDocument, include_raw: bool = False) -> str:
    """Serialize a document as JSON with stable key order (UTF-8 friendly)."""
    payload = {
        "paper_id": doc.paper_id,
        "platform": doc.platform,
        "format": doc.format,
        "title": doc.title,
        "year": doc.year,
        "source_kind": doc.source_kind,
        "domains": [list(d) for d in doc.domains],
        "elements": [element_to_dict(el) for el in doc.elements],
    }
    if include_raw:
        payload["raw"] = doc.raw
    return json.dumps(payload, ensure_ascii=False, indent=2)
