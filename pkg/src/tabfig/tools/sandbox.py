"""Gated local code execution, disabled by default.

When enabled, snippets run in a separate isolated-mode Python process
with a wall-clock limit, an address-space cap, and socket creation
stubbed out. This deliberately trades the full container isolation of a
production deployment for a dependency-free local stand-in.
"""

from __future__ import annotations

import subprocess
import sys

from .registry import ToolEnv, ToolFailure

_PRELUDE = """\
import socket as _socket
def _deny(*a, **k):
    raise OSError("network access is disabled in the sandbox")
_socket.socket = _deny
_socket.create_connection = _deny
import resource as _resource
_resource.setrlimit(_resource.RLIMIT_AS, ({mem_bytes}, {mem_bytes}))
del _socket, _resource
"""


def sandbox_explorer(params: dict, env: ToolEnv) -> str:
    if not env.sandbox_enabled:
        raise ToolFailure("disabled", "sandbox execution is disabled by configuration")
    timeout = min(float(params.get("timeout") or env.sandbox_timeout), env.sandbox_timeout)
    mem_bytes = env.sandbox_memory_mb * 1024 * 1024
    code = _PRELUDE.format(mem_bytes=mem_bytes) + params["code"]
    try:
        proc = subprocess.run(
            [sys.executable, "-I", "-c", code],
            capture_output=True,
            text=True,
            timeout=timeout,
        )
    except subprocess.TimeoutExpired as exc:
        raise TimeoutError(f"sandbox exceeded {timeout:.1f}s wall clock") from exc
    output = proc.stdout
    if proc.returncode != 0:
        output += f"\n[exit {proc.returncode}] {proc.stderr.strip()}"
    return output
