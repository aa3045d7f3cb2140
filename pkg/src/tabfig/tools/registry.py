"""One invocation contract over all 16 tools.

``validate_call`` checks presence, type, and enum membership of every
parameter; ``invoke`` routes to the implementation and always returns a
ToolResult — every failure mode, including schema violations and raised
exceptions, becomes an error-status result so the retrieval loop can
continue.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

from .specs import TOOL_SPECS, ParamSpec

DEFAULT_PAYLOAD_BUDGET = 8192


@dataclass
class ToolCall:
    tool_name: str
    params: dict = field(default_factory=dict)
    turn_index: int = 0


@dataclass
class SchemaViolation:
    detail: str

    def __bool__(self) -> bool:
        return False


@dataclass
class ToolResult:
    status: str  # "ok" | "error"
    payload: str
    error_kind: str | None = None
    latency: float = 0.0  # milliseconds

    def __post_init__(self):
        if (self.error_kind is not None) != (self.status == "error"):
            raise ValueError("error_kind present iff status is error")


@dataclass
class ToolEnv:
    """Everything tool implementations may touch."""

    documents: dict = field(default_factory=dict)  # paper_id -> PaperDocument
    gateway: object = None
    vision_backend: object = None
    http_get: object = None  # callable(url, params) -> str, None = requests
    mode: str = "replay"  # "replay" | "live"
    cache_dir: Path | None = None
    web_search_endpoint: str = "https://example.invalid/search"
    sandbox_enabled: bool = False
    sandbox_timeout: float = 10.0
    sandbox_memory_mb: int = 512
    payload_budget: int = DEFAULT_PAYLOAD_BUDGET
    _graphs: dict = field(default_factory=dict)

    def graph_for(self, paper_id: str):
        from ..document.model import build_reference_graph

        if paper_id not in self._graphs:
            self._graphs[paper_id] = build_reference_graph(self.documents[paper_id])
        return self._graphs[paper_id]


def _type_ok(value, spec: ParamSpec) -> bool:
    if spec.type == "string":
        return isinstance(value, str)
    if spec.type == "integer":
        return isinstance(value, int) and not isinstance(value, bool)
    if spec.type == "number":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if spec.type == "boolean":
        return isinstance(value, bool)
    if spec.type == "enum":
        return isinstance(value, str)
    return False


def validate_call(call: ToolCall):
    """Return True for a schema-clean call, else a SchemaViolation value."""
    spec = TOOL_SPECS.get(call.tool_name)
    if spec is None:
        return SchemaViolation(f"unknown_tool:{call.tool_name}")
    for pname in call.params:
        if pname not in spec.param_schema:
            return SchemaViolation(f"unknown_param:{pname}")
    for pname, pspec in spec.param_schema.items():
        if pname not in call.params:
            if pspec.required:
                return SchemaViolation(f"missing:{pname}")
            continue
        value = call.params[pname]
        if not _type_ok(value, pspec):
            return SchemaViolation(f"type:{pname}")
        if pspec.type == "enum" and value not in pspec.choices:
            return SchemaViolation(f"enum:{pname}")
    return True


def coerce_params(tool_name: str, raw: dict[str, str]) -> dict:
    """Best-effort typing of text parameter values against the schema.

    Values that do not convert keep their raw string form, which
    validate_call then reports as a type violation.
    """
    spec = TOOL_SPECS.get(tool_name)
    if spec is None:
        return dict(raw)
    out: dict = {}
    for name, value in raw.items():
        pspec = spec.param_schema.get(name)
        if pspec is None or not isinstance(value, str):
            out[name] = value
            continue
        text = value.strip()
        if pspec.type == "integer":
            try:
                out[name] = int(text)
            except ValueError:
                out[name] = value
        elif pspec.type == "number":
            try:
                out[name] = float(text)
            except ValueError:
                out[name] = value
        elif pspec.type == "boolean":
            out[name] = text.lower() == "true" if text.lower() in ("true", "false") else value
        else:
            out[name] = text
    return out


def truncate_payload(text: str, budget: int) -> str:
    """Cut text to at most ``budget`` bytes on a UTF-8 codepoint boundary."""
    encoded = text.encode("utf-8")
    if len(encoded) <= budget:
        return text
    return encoded[:budget].decode("utf-8", errors="ignore")


def invoke(call: ToolCall, env: ToolEnv) -> ToolResult:
    """Run one tool call; never raises past this frame."""
    from . import local, sandbox, search, vision

    handlers = {
        "online_fetcher": local.online_fetcher,
        "pdf_parser": local.pdf_parser,
        "xml_parser": local.xml_parser,
        "abstract_collector": local.abstract_collector,
        "information_localizer": local.information_localizer,
        "context_finder": local.context_finder,
        "section_extractor": local.section_extractor,
        "arxiv_searcher": search.arxiv_searcher,
        "pubmed_searcher": search.pubmed_searcher,
        "semantic_scholar_searcher": search.semantic_scholar_searcher,
        "web_searcher": search.web_searcher,
        "wikipedia_searcher": search.wikipedia_searcher,
        "ocr_extractor": vision.ocr_extractor,
        "figure_parser": vision.figure_parser,
        "image_analyzer": vision.image_analyzer,
        "sandbox_explorer": sandbox.sandbox_explorer,
    }

    started = time.monotonic()

    def done(status: str, payload: str, error_kind: str | None = None) -> ToolResult:
        return ToolResult(
            status=status,
            payload=truncate_payload(payload, env.payload_budget),
            error_kind=error_kind,
            latency=(time.monotonic() - started) * 1e3,
        )

    verdict = validate_call(call)
    if isinstance(verdict, SchemaViolation):
        return done("error", verdict.detail, "schema_violation")
    try:
        payload = handlers[call.tool_name](call.params, env)
        return done("ok", payload)
    except ToolFailure as exc:
        return done("error", str(exc), exc.kind)
    except TimeoutError as exc:
        return done("error", str(exc), "timeout")
    except Exception as exc:  # tool bugs must not kill the agent loop
        return done("error", f"{type(exc).__name__}: {exc}", "internal")


class ToolFailure(Exception):
    """Tool-level failure with a machine-readable kind."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind
