"""Extracting tool invocations from tagged agent text."""

from __future__ import annotations

from ..tools.registry import ToolCall, coerce_params
from ..tools.specs import TOOL_SPECS
from .tags import extract_tag


def parse_tool_call_text(text: str, turn_index: int = 0) -> ToolCall | None:
    """Build a ToolCall from ``<tool>`` plus per-parameter tags, if present.

    Parameter values are read from tags named after the tool's schema
    parameters and coerced to their declared types; failed coercions stay
    strings so validation can flag them.
    """
    tool_name = extract_tag(text, "tool")
    if tool_name is None:
        return None
    tool_name = tool_name.strip()
    raw_params: dict[str, str] = {}
    spec = TOOL_SPECS.get(tool_name)
    for pname in spec.param_schema if spec else ():
        value = extract_tag(text, pname)
        if value is not None:
            raw_params[pname] = value
    return ToolCall(
        tool_name=tool_name,
        params=coerce_params(tool_name, raw_params),
        turn_index=turn_index,
    )
