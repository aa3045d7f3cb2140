from __future__ import annotations

from pathlib import Path

import pytest

from tabfig.corpus.build import AnalysisInstance
from tabfig.corpus.thresholds import PipelineThresholds
from tabfig.document.model import DocElement
from tabfig.document.parse import parse_document
from tabfig.gateway.backends import BackendSpec, Gateway
from tabfig.gateway.embedders import HashEmbedder
from tabfig.tools.registry import ToolEnv

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def latex_source() -> str:
    return (DATA_DIR / "sample1.tex").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def xml_source() -> str:
    return (DATA_DIR / "sample2.xml").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def latex_doc(latex_source):
    return parse_document(
        latex_source,
        "latex",
        {"paper_id": "sample1", "title": "Spectral truncation filters", "year": 2025,
         "platform": "arxiv", "domains": [["Computer Science", "Machine Learning"]]},
    )


@pytest.fixture(scope="session")
def xml_doc(xml_source):
    return parse_document(
        xml_source,
        "xml",
        {"paper_id": "sample2", "title": "Dose response of candidate inhibitors",
         "year": 2024, "platform": "pubmed"},
    )


@pytest.fixture()
def thresholds() -> PipelineThresholds:
    return PipelineThresholds()


@pytest.fixture()
def embedder() -> HashEmbedder:
    return HashEmbedder(dim=16)


@pytest.fixture()
def mock_backend() -> BackendSpec:
    return BackendSpec(name="default", endpoint="mock://chat", model_id="scripted")


def scripted_gateway(script) -> tuple[Gateway, BackendSpec]:
    """Gateway with one scripted chat backend named 'default'."""
    gateway = Gateway(backoff_base=0.0)
    gateway.register_script("default", script)
    backend = BackendSpec(name="default", endpoint="mock://chat", model_id="scripted")
    return gateway, backend


@pytest.fixture()
def tool_env(latex_doc, xml_doc) -> ToolEnv:
    return ToolEnv(documents={latex_doc.paper_id: latex_doc, xml_doc.paper_id: xml_doc})


def make_instance(**overrides) -> AnalysisInstance:
    base = dict(
        instance_id="sample1/tbl-0001",
        inputs=[
            DocElement(
                element_id="tbl-0001",
                kind="table",
                body="Family & Truncated & Chebyshev \\\\ Grid & 1.2 & 3.4",
                label="tab:main",
                caption="Reconstruction error across graph families.",
            )
        ],
        source={
            "paper_id": "sample1",
            "platform": "arxiv",
            "format": "latex",
            "title": "Spectral truncation filters",
            "year": 2025,
            "source_kind": "general",
            "domains": [["Computer Science", "Machine Learning"]],
            "context": "[context depth 1] (paragraph) The truncated filter wins.",
        },
        query="Write a scientific analysis of the reconstruction error table.",
        gold=(
            "The truncated filter recovers the reference signal with lower "
            "error than the Chebyshev baseline on every graph family, and "
            "the margin grows with graph size."
        ),
        labels={
            "data_type": "table",
            "format": "latex",
            "source_kind": "general",
            "domain": ["Computer Science", "Machine Learning"],
            "width": "internal",
            "depth": "unknown",
            "objective": "unknown",
        },
        lengths={"inputs": 10, "context": 9, "gold": 28},
    )
    base.update(overrides)
    return AnalysisInstance(**base)


@pytest.fixture()
def instance() -> AnalysisInstance:
    return make_instance()
