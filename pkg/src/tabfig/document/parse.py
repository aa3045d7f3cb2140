"""Format dispatch for document parsing."""

from __future__ import annotations

from dataclasses import dataclass, field

from .latex import parse_latex_elements
from .model import PaperDocument
from .xmldoc import parse_xml_elements


@dataclass
class PaperMeta:
    """Paper-level metadata supplied alongside the raw source."""

    paper_id: str
    title: str = ""
    platform: str = "other"
    year: int = 2000
    source_kind: str = "general"
    domains: list[tuple[str, str]] = field(default_factory=list)

    @classmethod
    def from_dict(cls, d: dict) -> "PaperMeta":
        return cls(
            paper_id=d["paper_id"],
            title=d.get("title", ""),
            platform=d.get("platform", "other"),
            year=int(d.get("year", 2000)),
            source_kind=d.get("source_kind", "general"),
            domains=[tuple(x) for x in d.get("domains", [])],
        )


def parse_document(raw: str, format: str, paper_meta: PaperMeta | dict) -> PaperDocument:
    """Parse LaTeX or XML source into a PaperDocument.

    Raises MalformedSource when markup is broken beyond repair, which
    feeds the paper-level parse-failure filter upstream.
    """
    if not raw:
        raise ValueError("raw source must be non-empty")
    if format not in ("latex", "xml"):
        raise ValueError(f"unsupported format {format!r}")
    if isinstance(paper_meta, dict):
        paper_meta = PaperMeta.from_dict(paper_meta)

    elements = parse_latex_elements(raw) if format == "latex" else parse_xml_elements(raw)
    return PaperDocument(
        paper_id=paper_meta.paper_id,
        platform=paper_meta.platform,
        format=format,
        title=paper_meta.title,
        year=paper_meta.year,
        source_kind=paper_meta.source_kind,
        domains=list(paper_meta.domains),
        elements=elements,
        raw=raw,
    )
