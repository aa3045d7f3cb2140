from .model import (
    DocElement,
    PaperDocument,
    ReferenceGraph,
    build_reference_graph,
    document_to_json,
    locate_element,
)
from .parse import parse_document

__all__ = [
    "DocElement",
    "PaperDocument",
    "ReferenceGraph",
    "build_reference_graph",
    "document_to_json",
    "locate_element",
    "parse_document",
]
