"""Paper-level and element-level acceptance filters.

Rejection is a value, not an error: every filter returns a
:class:`FilterDecision` with a machine-readable reason so stage reports
can account for every input.
"""

from __future__ import annotations

import xml.parsers.expat
from dataclasses import dataclass
from typing import Callable

from ..document.latex import _scan_environments
from ..document.model import DocElement, PaperDocument
from ..errors import MalformedSource
from .thresholds import PipelineThresholds


@dataclass
class FilterDecision:
    accepted: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.accepted


ACCEPT = FilterDecision(True)


def filter_paper(
    doc: PaperDocument,
    thresholds: PipelineThresholds,
    keyword_predicate: Callable[[PaperDocument], bool] | None = None,
    domain_predicate: Callable[[PaperDocument], bool] | None = None,
    parse_failed: bool = False,
) -> FilterDecision:
    """Apply paper-level filters: year floor, predicates, parse failures.

    The keyword and domain predicates are configurable hooks (the filter
    criteria vary per collection run); ``None`` means pass-through.
    """
    if parse_failed:
        return FilterDecision(False, "parse_failure")
    if doc.year < thresholds.min_year:
        return FilterDecision(False, "year")
    if domain_predicate is not None and not domain_predicate(doc):
        return FilterDecision(False, "domain")
    if keyword_predicate is not None and not keyword_predicate(doc):
        return FilterDecision(False, "keyword")
    return ACCEPT


def _body_well_formed(el: DocElement, format: str) -> bool:
    if format == "latex":
        try:
            _scan_environments(el.body)
        except MalformedSource:
            return False
        return el.body.count("{") == el.body.count("}")
    parser = xml.parsers.expat.ParserCreate()
    try:
        parser.Parse(el.body.encode("utf-8"), True)
    except xml.parsers.expat.ExpatError:
        return False
    return True


def filter_element(
    el: DocElement,
    format: str = "latex",
    require_caption: bool = False,
) -> FilterDecision:
    """Accept a table/figure element unless empty, broken, or uncaptioned."""
    if el.kind not in ("table", "figure"):
        raise ValueError(f"filter_element expects a table or figure, got {el.kind!r}")
    if not el.body.strip() and not el.image_ref:
        return FilterDecision(False, "empty")
    if el.body.strip() and not _body_well_formed(el, format):
        return FilterDecision(False, "format_error")
    if require_caption and not (el.caption or "").strip():
        return FilterDecision(False, "missing_caption")
    return ACCEPT
