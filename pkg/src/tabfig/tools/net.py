"""HTTP fetching with on-disk response caching for replay.

Responses are cached keyed by a hash of (tool, canonicalized params), so
live runs record fixtures and replay runs resolve the same requests
offline. A replay miss is a network failure by definition.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .registry import ToolEnv, ToolFailure


def request_key(tool: str, params: dict) -> str:
    canonical = json.dumps({"tool": tool, "params": params}, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _fixture_path(env: ToolEnv, key: str) -> Path | None:
    if env.cache_dir is None:
        return None
    return Path(env.cache_dir) / f"{key}.json"


def cached_fetch(env: ToolEnv, tool: str, params: dict, url: str, query: dict | None = None) -> str:
    """Fetch ``url`` honoring the env's replay/live mode and cache."""
    key = request_key(tool, params)
    path = _fixture_path(env, key)
    if path is not None and path.exists():
        return json.loads(path.read_text(encoding="utf-8"))["body"]
    if env.mode == "replay":
        raise ToolFailure("network_failure", f"replay miss for {tool} (key {key[:12]})")

    body = _do_get(env, url, query)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps({"tool": tool, "params": params, "url": url, "body": body}, ensure_ascii=False),
            encoding="utf-8",
        )
    return body


def _do_get(env: ToolEnv, url: str, query: dict | None) -> str:
    if env.http_get is not None:
        return env.http_get(url, query or {})
    import requests

    try:
        resp = requests.get(url, params=query or {}, timeout=30)
    except requests.RequestException as exc:
        raise ToolFailure("network_failure", str(exc)) from exc
    if resp.status_code >= 400:
        raise ToolFailure("network_failure", f"status {resp.status_code} from {url}")
    return resp.text


def write_fixture(cache_dir: Path, tool: str, params: dict, body: str) -> Path:
    """Record a canned response for later replay (test helper)."""
    key = request_key(tool, params)
    path = Path(cache_dir) / f"{key}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps({"tool": tool, "params": params, "body": body}, ensure_ascii=False),
        encoding="utf-8",
    )
    return path
