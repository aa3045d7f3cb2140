"""Document and knowledge toolkit implementations.

These run locally over loaded documents and the reference graph;
payloads are a pure function of the documents, so identical documents
produce identical payloads.
"""

from __future__ import annotations

from pathlib import Path

from ..corpus.context import retrieve_context
from ..document.model import PaperDocument, locate_element
from ..document.parse import parse_document
from ..errors import MalformedSource, UnknownTarget
from .net import cached_fetch
from .pdftext import extract_pdf_text
from .registry import ToolEnv, ToolFailure


def _pick_document(env: ToolEnv, paper_id: str | None) -> PaperDocument:
    if not env.documents:
        raise ToolFailure("not_found", "no documents loaded")
    if paper_id is None:
        if len(env.documents) == 1:
            return next(iter(env.documents.values()))
        raise ToolFailure("not_found", "paper_id required when multiple documents are loaded")
    doc = env.documents.get(paper_id)
    if doc is None:
        raise ToolFailure("not_found", f"unknown paper_id {paper_id!r}")
    return doc


def _element_digest(el, body_chars: int = 400) -> str:
    head = el.body.strip().replace("\n", " ")
    if len(head) > body_chars:
        head = head[:body_chars] + "..."
    caption = f" caption={el.caption!r}" if el.caption else ""
    label = f" label={el.label!r}" if el.label else ""
    return f"[{el.element_id}] kind={el.kind}{label}{caption}\n{head}"


def online_fetcher(params: dict, env: ToolEnv) -> str:
    url = params["url"]
    body = cached_fetch(env, "online_fetcher", params, url)
    preferred = params.get("preferred_format")
    if preferred in ("latex", "xml"):
        try:
            doc = parse_document(body, preferred, {"paper_id": url, "title": url})
            kinds: dict[str, int] = {}
            for el in doc.elements:
                kinds[el.kind] = kinds.get(el.kind, 0) + 1
            summary = ", ".join(f"{k}:{v}" for k, v in sorted(kinds.items()))
            return f"fetched {url} ({summary})\n\n{body}"
        except MalformedSource:
            pass
    return f"fetched {url}\n\n{body}"


def pdf_parser(params: dict, env: ToolEnv) -> str:
    source = params["source"]
    path = Path(source)
    if path.exists():
        data = path.read_bytes()
    elif source.startswith(("http://", "https://")):
        data = cached_fetch(env, "pdf_parser", params, source).encode("latin-1", errors="ignore")
    else:
        raise ToolFailure("not_found", f"no such file {source!r}")
    text = extract_pdf_text(data)
    if not text.strip():
        raise ToolFailure("parse_failure", "no extractable text in PDF")
    return text


def xml_parser(params: dict, env: ToolEnv) -> str:
    source = params["source"]
    if source.lstrip().startswith("<"):
        raw = source
    elif Path(source).exists():
        raw = Path(source).read_text(encoding="utf-8")
    elif source.startswith(("http://", "https://")):
        raw = cached_fetch(env, "xml_parser", params, source)
    else:
        raise ToolFailure("not_found", f"no such file {source!r}")
    try:
        doc = parse_document(raw, "xml", {"paper_id": "xml_parser", "title": ""})
    except MalformedSource as exc:
        raise ToolFailure("parse_failure", str(exc)) from exc
    if params.get("detail") == "full":
        return "\n\n".join(_element_digest(el, body_chars=2000) for el in doc.elements)
    return "\n".join(_element_digest(el, body_chars=200) for el in doc.elements)


def abstract_collector(params: dict, env: ToolEnv) -> str:
    query = params["query"]
    for doc in env.documents.values():
        if params.get("paper_id") and doc.paper_id != params["paper_id"]:
            continue
        if query.lower() in (doc.title or "").lower() or query == doc.paper_id:
            for el in doc.elements:
                if el.kind == "section" and (el.caption or "").strip().lower() == "abstract":
                    return f"{doc.title}\n\n{el.body.strip()}"
            for el in doc.elements:
                if el.kind == "paragraph":
                    return f"{doc.title}\n\n{el.body.strip()}"
    # fall back to the literature APIs for unloaded papers
    from .search import semantic_scholar_searcher

    return semantic_scholar_searcher({"query": query, "max_results": 1}, env)


def information_localizer(params: dict, env: ToolEnv) -> str:
    doc = _pick_document(env, params.get("paper_id"))
    matches = locate_element(doc, params["query"])
    limit = params.get("max_results") or 5
    if not matches:
        return "no elements matched the query"
    return "\n\n".join(_element_digest(el, body_chars=1500) for el in matches[:limit])


def context_finder(params: dict, env: ToolEnv) -> str:
    doc = _pick_document(env, params.get("paper_id"))
    query = params["query"]
    # an exact label anchor beats positional text matches
    target = next((el for el in doc.elements if el.label == query.strip()), None)
    if target is None:
        matches = locate_element(doc, query)
        if not matches:
            raise ToolFailure("not_found", "no element matched the query")
        target = matches[0]
    graph = env.graph_for(doc.paper_id)
    depth = params.get("depth") or 1
    try:
        ctx = retrieve_context(graph, target.element_id, depth)
    except UnknownTarget as exc:
        raise ToolFailure("not_found", str(exc)) from exc
    lines = [f"target: {_element_digest(target, body_chars=300)}"]
    for level_index, level in enumerate(ctx.levels, start=1):
        for eid in sorted(level):
            lines.append(f"-- depth {level_index} --\n{_element_digest(doc.element(eid), body_chars=800)}")
    return "\n\n".join(lines)


def section_extractor(params: dict, env: ToolEnv) -> str:
    doc = _pick_document(env, params.get("paper_id"))
    wanted = params["section"].strip().lower()
    sections = doc.by_kind("section")
    for index, el in enumerate(sections, start=1):
        title = (el.caption or "").strip().lower()
        if wanted in (title, (el.label or "").lower(), str(index)):
            return el.body
    for el in sections:
        if wanted in (el.caption or "").lower():
            return el.body
    raise ToolFailure("not_found", f"no section matching {params['section']!r}")
