"""Run configuration: one structured file, env vars for secrets.

A config file (YAML or JSON) declares backends, agent budgets, corpus
thresholds, and tool settings; command-line flags override file values.
The canonical hash of the resolved configuration binds every run
manifest to the exact settings used.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path

import yaml

from .agents.orchestrator import PipelineConfig
from .corpus.thresholds import PipelineThresholds
from .gateway.backends import BackendSpec, Gateway
from .gateway.embedders import GatewayEmbedder, HashEmbedder
from .gateway.stubs import autopilot_script
from .rewards.breakdown import RewardWeights
from .tools.registry import ToolEnv

DEFAULT_CONFIG: dict = {
    "seed": 0,
    "workers": 1,
    "backends": {
        "default": {"endpoint": "mock://chat", "model_id": "mock-chat", "kind": "chat"},
        "embedding": {
            "endpoint": "mock://embedding",
            "model_id": "mock-embedding",
            "kind": "embedding",
        },
        "judge": {"endpoint": "mock://chat", "model_id": "mock-judge", "kind": "chat"},
    },
    "pipeline": {
        "max_planner_turns": 1,
        "max_expert_turns": 5,
        "max_solver_turns": 2,
        "max_critic_turns": 1,
        "variant": "anagent_critic",
        "k_shot": 0,
        "plan_limit": 500,
        "summary_len": 1500,
        "feedback_limit": 1000,
    },
    "requirements": None,
    "thresholds": {},
    "tools": {
        "mode": "replay",
        "cache_dir": None,
        "sandbox_enabled": False,
        "sandbox_timeout": 10.0,
        "payload_budget": 8192,
        "web_search_endpoint": "https://example.invalid/search",
    },
    "reward_weights": {},
    "embedding_dim": 16,
    "corpus": {"papers": [], "eval_year": 2025},
    "exemplar_pool": [],
}


def _deep_merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> dict:
    """Resolve the configuration: defaults <- file <- flag overrides."""
    config = dict(DEFAULT_CONFIG)
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        loaded = yaml.safe_load(text) or {}
        if not isinstance(loaded, dict):
            raise ValueError(f"config file {path} must hold a mapping")
        config = _deep_merge(config, loaded)
    if overrides:
        config = _deep_merge(config, {k: v for k, v in overrides.items() if v is not None})
    return config


def config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, ensure_ascii=False, default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


@dataclass
class RunManifest:
    """Binds a run's artifacts to the configuration that produced them."""

    config_hash: str
    seed: int
    variant: str
    instance_files: list[str]
    backend_names: list[str]
    output_dir: str
    started_at: str
    finished_at: str | None = None

    def write(self, path: Path) -> None:
        path.write_text(
            json.dumps(self.__dict__, indent=2, sort_keys=True, ensure_ascii=False),
            encoding="utf-8",
        )


def new_manifest(config: dict, variant: str, instance_files: list[str], out_dir: Path) -> RunManifest:
    return RunManifest(
        config_hash=config_hash(config),
        seed=int(config.get("seed", 0)),
        variant=variant,
        instance_files=[str(p) for p in instance_files],
        backend_names=sorted(config.get("backends", {})),
        output_dir=str(out_dir),
        started_at=time.strftime("%Y-%m-%dT%H:%M:%S"),
    )


def force_mock(config: dict) -> dict:
    """Point every backend at the in-process mock implementations."""
    out = json.loads(json.dumps(config))
    for name, spec in out.get("backends", {}).items():
        spec["endpoint"] = "mock://embedding" if spec.get("kind") == "embedding" else "mock://chat"
    out.setdefault("tools", {})["mode"] = "replay"
    return out


def build_backends(config: dict) -> dict[str, BackendSpec]:
    return {
        name: BackendSpec.from_dict(name, spec) for name, spec in config.get("backends", {}).items()
    }


def build_gateway(config: dict, backends: dict[str, BackendSpec] | None = None) -> Gateway:
    """Gateway with scripts/embedders registered for every mock backend."""
    backends = backends or build_backends(config)
    gateway = Gateway()
    for name, spec in backends.items():
        if not spec.is_mock:
            continue
        if spec.kind == "chat":
            gateway.register_script(name, autopilot_script)
        else:
            gateway.register_embedder(name, HashEmbedder(dim=int(config.get("embedding_dim", 16))))
    return gateway


def build_embedder(config: dict, gateway: Gateway, backends: dict[str, BackendSpec]):
    spec = backends.get("embedding")
    if spec is None or spec.is_mock:
        return HashEmbedder(dim=int(config.get("embedding_dim", 16)))
    return GatewayEmbedder(gateway, spec)


def build_pipeline_config(config: dict, backends: dict[str, BackendSpec], variant: str | None = None) -> PipelineConfig:
    pipe = dict(config.get("pipeline", {}))
    if variant:
        pipe["variant"] = variant
    agent_backends = {
        name: backends[name]
        for name in ("planner", "expert", "solver", "critic", "default")
        if name in backends
    }
    return PipelineConfig(
        max_planner_turns=int(pipe.get("max_planner_turns", 1)),
        max_expert_turns=int(pipe.get("max_expert_turns", 5)),
        max_solver_turns=int(pipe.get("max_solver_turns", 2)),
        max_critic_turns=int(pipe.get("max_critic_turns", 1)),
        backends=agent_backends,
        variant=pipe.get("variant", "anagent_critic"),
        k_shot=int(pipe.get("k_shot", 0)),
        exemplar_pool=config.get("exemplar_pool", []),
        requirements=config.get("requirements"),
        plan_limit=int(pipe.get("plan_limit", 500)),
        summary_len=int(pipe.get("summary_len", 1500)),
        feedback_limit=int(pipe.get("feedback_limit", 1000)),
        tool_names=pipe.get("tool_names"),
    )


def build_tool_env(config: dict, gateway: Gateway, backends: dict[str, BackendSpec], documents: dict | None = None) -> ToolEnv:
    tools = config.get("tools", {})
    vision = backends.get("vision") or backends.get("default")
    return ToolEnv(
        documents=documents or {},
        gateway=gateway,
        vision_backend=vision,
        mode=tools.get("mode", "replay"),
        cache_dir=Path(tools["cache_dir"]) if tools.get("cache_dir") else None,
        web_search_endpoint=tools.get("web_search_endpoint", "https://example.invalid/search"),
        sandbox_enabled=bool(tools.get("sandbox_enabled", False)),
        sandbox_timeout=float(tools.get("sandbox_timeout", 10.0)),
        payload_budget=int(tools.get("payload_budget", 8192)),
    )


def build_thresholds(config: dict) -> PipelineThresholds:
    return PipelineThresholds.from_dict(config.get("thresholds", {}))


def build_reward_weights(config: dict) -> RewardWeights:
    return RewardWeights.from_dict(config.get("reward_weights", {}))
