from .build import AnalysisInstance, build_instance, instance_from_dict, instance_to_dict
from .classify import classify_mllm, classify_rule
from .context import ContextSet, retrieve_context
from .filters import FilterDecision, filter_element, filter_paper
from .split import split_eval
from .thresholds import PipelineThresholds

__all__ = [
    "AnalysisInstance",
    "ContextSet",
    "FilterDecision",
    "PipelineThresholds",
    "build_instance",
    "classify_mllm",
    "classify_rule",
    "filter_element",
    "filter_paper",
    "instance_from_dict",
    "instance_to_dict",
    "retrieve_context",
    "split_eval",
]
