"""Declarative specs for the five toolkits / 16 tools.

Each tool declares its toolkit, a short description rendered into the
retrieval agent's prompt, and a typed parameter schema. Per the tool
table, every parameter beyond the primary query/source is optional.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class ParamSpec:
    type: str  # "string" | "integer" | "number" | "boolean" | "enum"
    required: bool = False
    choices: tuple[str, ...] = ()
    help: str = ""


@dataclass
class ToolSpec:
    tool_name: str
    toolkit: str  # document | knowledge | search | vision | sandbox
    description: str
    param_schema: dict[str, ParamSpec] = field(default_factory=dict)


def _p(type: str, required: bool = False, choices: tuple[str, ...] = (), help: str = "") -> ParamSpec:
    return ParamSpec(type=type, required=required, choices=choices, help=help)


TOOL_SPECS: dict[str, ToolSpec] = {
    spec.tool_name: spec
    for spec in [
        ToolSpec(
            "online_fetcher",
            "document",
            "Fetch and parse a document from an online source (arXiv, PubMed "
            "Central, Semantic Scholar, or a general URL).",
            {
                "url": _p("string", required=True, help="document URL"),
                "source_type": _p("enum", choices=("arxiv", "pubmed", "semantic_scholar", "web")),
                "preferred_format": _p("enum", choices=("html", "latex", "xml", "pdf")),
            },
        ),
        ToolSpec(
            "pdf_parser",
            "document",
            "Parse a PDF document and extract its text content.",
            {
                "source": _p("string", required=True, help="local path or URL"),
            },
        ),
        ToolSpec(
            "xml_parser",
            "document",
            "Parse an XML document and extract metadata and hierarchical contents.",
            {
                "source": _p("string", required=True, help="local path, URL, or literal XML"),
                "detail": _p("enum", choices=("summary", "full")),
            },
        ),
        ToolSpec(
            "abstract_collector",
            "knowledge",
            "Collect the abstract of a paper, from loaded documents or academic sources.",
            {
                "query": _p("string", required=True, help="title, identifier, or keywords"),
                "paper_id": _p("string"),
            },
        ),
        ToolSpec(
            "information_localizer",
            "knowledge",
            "Localize and extract the complete section, table, figure, or passage "
            "matching the query in a loaded document.",
            {
                "query": _p("string", required=True),
                "paper_id": _p("string"),
                "max_results": _p("integer"),
            },
        ),
        ToolSpec(
            "context_finder",
            "knowledge",
            "Localize a search string in a document and extract all bidirectional "
            "citation contexts, with multi-level traversal support.",
            {
                "query": _p("string", required=True),
                "paper_id": _p("string"),
                "depth": _p("integer", help="traversal depth, default 1"),
            },
        ),
        ToolSpec(
            "section_extractor",
            "knowledge",
            "Extract the complete section matching a section identifier.",
            {
                "section": _p("string", required=True, help="title, label, or number"),
                "paper_id": _p("string"),
            },
        ),
        ToolSpec(
            "arxiv_searcher",
            "search",
            "Search arXiv preprints across domains.",
            {
                "query": _p("string", required=True),
                "max_results": _p("integer"),
                "category": _p("string"),
                "sort_by": _p("enum", choices=("relevance", "lastUpdatedDate", "submittedDate")),
            },
        ),
        ToolSpec(
            "pubmed_searcher",
            "search",
            "Search biomedical literature in PubMed.",
            {
                "query": _p("string", required=True),
                "max_results": _p("integer"),
                "time_range": _p("string", help="e.g. 2023:2025"),
            },
        ),
        ToolSpec(
            "semantic_scholar_searcher",
            "search",
            "Search literature via the Semantic Scholar graph API.",
            {
                "query": _p("string", required=True),
                "max_results": _p("integer"),
                "year": _p("string"),
                "fields": _p("string"),
            },
        ),
        ToolSpec(
            "web_searcher",
            "search",
            "Search the web through the configured search endpoint.",
            {
                "query": _p("string", required=True),
                "max_results": _p("integer"),
                "language": _p("string"),
            },
        ),
        ToolSpec(
            "wikipedia_searcher",
            "search",
            "Search Wikipedia concepts, terminologies, and articles.",
            {
                "query": _p("string", required=True),
                "mode": _p("enum", choices=("search", "summary")),
            },
        ),
        ToolSpec(
            "ocr_extractor",
            "vision",
            "Transcribe text visible in an image.",
            {
                "image": _p("string", required=True, help="image path"),
                "language": _p("string"),
            },
        ),
        ToolSpec(
            "figure_parser",
            "vision",
            "Parse and extract visual information from a scientific figure.",
            {
                "image": _p("string", required=True),
                "query": _p("string"),
            },
        ),
        ToolSpec(
            "image_analyzer",
            "vision",
            "Analyze an image with query-driven exploration.",
            {
                "image": _p("string", required=True),
                "query": _p("string"),
                "focus": _p("string"),
                "detail": _p("enum", choices=("low", "high")),
            },
        ),
        ToolSpec(
            "sandbox_explorer",
            "sandbox",
            "Execute a Python snippet in a resource-limited local sandbox "
            "(disabled unless explicitly enabled in config).",
            {
                "code": _p("string", required=True),
                "timeout": _p("number"),
            },
        ),
    ]
}

TOOLKITS = ("document", "knowledge", "search", "vision", "sandbox")


def render_tool_info(names: list[str] | None = None) -> str:
    """Tool catalog block for the retrieval agent prompt."""
    lines: list[str] = []
    for spec in TOOL_SPECS.values():
        if names is not None and spec.tool_name not in names:
            continue
        lines.append(f"- {spec.tool_name} ({spec.toolkit} toolkit): {spec.description}")
        for pname, p in spec.param_schema.items():
            req = "required" if p.required else "optional"
            kind = f"one of {'/'.join(p.choices)}" if p.choices else p.type
            hint = f"; {p.help}" if p.help else ""
            lines.append(f"    <{pname}>...</{pname}> ({req}, {kind}{hint})")
    return "\n".join(lines)
