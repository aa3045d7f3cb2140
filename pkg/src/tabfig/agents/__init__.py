from .orchestrator import (
    AgentTranscript,
    CritiqueReport,
    KnowledgeBase,
    PipelineConfig,
    PipelineRunner,
    Plan,
    run_pipeline,
)
from .tags import extract_tag, has_tags, parse_tags

__all__ = [
    "AgentTranscript",
    "CritiqueReport",
    "KnowledgeBase",
    "PipelineConfig",
    "PipelineRunner",
    "Plan",
    "extract_tag",
    "has_tags",
    "parse_tags",
    "run_pipeline",
]
