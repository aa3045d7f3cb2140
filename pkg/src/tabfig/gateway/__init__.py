from .backends import BackendSpec, ChatResponse, ChatTurn, EmbeddingVector, Gateway
from .embedders import GatewayEmbedder, HashEmbedder
from .stubs import ScriptedBackend, autopilot_script

__all__ = [
    "BackendSpec",
    "ChatResponse",
    "ChatTurn",
    "EmbeddingVector",
    "Gateway",
    "GatewayEmbedder",
    "HashEmbedder",
    "ScriptedBackend",
    "autopilot_script",
]
