from .registry import (
    SchemaViolation,
    ToolCall,
    ToolEnv,
    ToolResult,
    coerce_params,
    invoke,
    truncate_payload,
    validate_call,
)
from .specs import TOOL_SPECS, TOOLKITS, ToolSpec, render_tool_info

__all__ = [
    "SchemaViolation",
    "TOOLKITS",
    "TOOL_SPECS",
    "ToolCall",
    "ToolEnv",
    "ToolResult",
    "ToolSpec",
    "coerce_params",
    "invoke",
    "render_tool_info",
    "truncate_payload",
    "validate_call",
]
