"""XML parsing targeting JATS-style tags with a generic-tag fallback.

Uses expat for well-formedness checking and byte-accurate element spans.
JATS names (``sec``, ``table-wrap``, ``fig``, ``disp-formula``, ``p``,
``ref``) map directly; unknown vocabularies fall back to substring
heuristics on the local tag name, so non-JATS documents still yield typed
elements rather than nothing.
"""

from __future__ import annotations

import re
import xml.parsers.expat

from ..errors import MalformedSource
from .model import DocElement

_KIND_PREFIX = {
    "section": "sec",
    "table": "tbl",
    "figure": "fig",
    "equation": "eq",
    "paragraph": "par",
    "bib_entry": "bib",
}

_TAGS = re.compile(r"<[^>]*>")
_WS = re.compile(r"\s+")


def _strip_tags(xml_text: str) -> str:
    return _WS.sub(" ", _TAGS.sub(" ", xml_text)).strip()


def _local_name(tag: str) -> str:
    # expat reports "uri SEP local" only with namespace handling on; we
    # parse without it, so strip any prefix manually.
    return tag.rsplit(":", 1)[-1].lower()


def _kind_for_tag(tag: str) -> str | None:
    name = _local_name(tag)
    if name in ("sec", "abstract"):
        return "section"
    if name == "table-wrap":
        return "table"
    if name == "fig":
        return "figure"
    if name == "disp-formula":
        return "equation"
    if name == "p":
        return "paragraph"
    # generic fallback for non-JATS vocabularies
    if "table" in name:
        return "table"
    if name.startswith("fig") or "figure" in name:
        return "figure"
    if "section" in name:
        return "section"
    if name in ("para", "paragraph"):
        return "paragraph"
    if "formula" in name or "equation" in name or name == "math":
        return "equation"
    return None


class _Capture:
    __slots__ = ("kind", "tag", "attrs", "start", "refs", "image_ref")

    def __init__(self, kind: str, tag: str, attrs: dict, start: int):
        self.kind = kind
        self.tag = tag
        self.attrs = attrs
        self.start = start
        self.refs: list[str] = []
        self.image_ref: str | None = None


def parse_xml_elements(raw: str) -> list[DocElement]:
    """Parse XML source into an ordered element list.

    Raises MalformedSource when the document is not well-formed.
    """
    data = raw.encode("utf-8")
    # byte offset -> char offset map (expat reports byte indexes)
    byte_of_char = [0]
    for ch in raw:
        byte_of_char.append(byte_of_char[-1] + len(ch.encode("utf-8")))
    char_of_byte = {b: c for c, b in enumerate(byte_of_char)}

    parser = xml.parsers.expat.ParserCreate()
    stack: list[_Capture | None] = []
    in_ref_list = [False]
    records: list[tuple[int, int, _Capture]] = []

    def to_char(byte_index: int) -> int:
        while byte_index not in char_of_byte and byte_index > 0:
            byte_index -= 1  # step back off a continuation byte
        return char_of_byte.get(byte_index, 0)

    def start_element(tag, attrs):
        name = _local_name(tag)
        if name == "ref-list":
            in_ref_list[0] = True
        if name == "xref" or "rid" in attrs:
            rid = attrs.get("rid", "")
            for cap in stack:
                if cap is not None and rid:
                    for key in rid.split():
                        if key not in cap.refs:
                            cap.refs.append(key)
        if name == "graphic" or name == "inline-graphic":
            href = next((v for k, v in attrs.items() if k.endswith("href")), None)
            for cap in reversed(stack):
                if cap is not None and cap.kind == "figure" and cap.image_ref is None:
                    cap.image_ref = href
                    break
        kind = _kind_for_tag(tag)
        if name == "ref" and in_ref_list[0]:
            kind = "bib_entry"
        if kind in ("paragraph", "table", "figure", "equation") and any(
            c is not None and c.kind in ("table", "figure", "equation", "bib_entry")
            for c in stack
        ):
            kind = None  # markup nested inside a float belongs to the float body
        if kind is not None:
            stack.append(_Capture(kind, tag, dict(attrs), parser.CurrentByteIndex))
        else:
            stack.append(None)

    def end_element(tag):
        if _local_name(tag) == "ref-list":
            in_ref_list[0] = False
        cap = stack.pop()
        if cap is None:
            return
        # CurrentByteIndex points at the '<' of the end tag
        end_byte = parser.CurrentByteIndex
        close = data.find(b">", end_byte)
        end_byte = (close + 1) if close >= 0 else end_byte
        records.append((cap.start, end_byte, cap))

    parser.StartElementHandler = start_element
    parser.EndElementHandler = end_element
    try:
        parser.Parse(data, True)
    except xml.parsers.expat.ExpatError as exc:
        raise MalformedSource(f"invalid XML: {exc}") from exc

    records.sort(key=lambda r: (r[0], -r[1]))
    counters: dict[str, int] = {}
    elements: list[DocElement] = []
    for start_byte, end_byte, cap in records:
        start, end = to_char(start_byte), to_char(end_byte)
        body = raw[start:end]
        counters[cap.kind] = counters.get(cap.kind, 0) + 1
        label = cap.attrs.get("id")
        caption = None
        if cap.kind in ("table", "figure"):
            m = re.search(r"<caption[^>]*>(.*?)</caption>", body, re.DOTALL)
            caption = _strip_tags(m.group(1)) if m else None
        elif cap.kind == "section":
            m = re.search(r"<title[^>]*>(.*?)</title>", body, re.DOTALL)
            caption = _strip_tags(m.group(1)) if m else None
        elements.append(
            DocElement(
                element_id=f"{_KIND_PREFIX[cap.kind]}-{counters[cap.kind]:04d}",
                kind=cap.kind,
                body=body,
                label=label,
                caption=caption,
                image_ref=cap.image_ref,
                outgoing_refs=[r for r in cap.refs if r != label],
                span=(start, end),
            )
        )
    return elements
