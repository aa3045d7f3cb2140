"""Uniform client for chat-completion and text-embedding backends.

Speaks the widely deployed JSON shapes: chat requests as
``{model, messages, temperature, max_tokens}`` with the reply at
``choices[0].message.content``, embedding requests as ``{model, input}``
with vectors under ``data[*].embedding``. Backends whose endpoint uses
the ``mock://`` scheme are served in-process from registered scripts,
which keeps every test and ``--mock`` run offline and bit-reproducible.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field

import numpy as np

from ..errors import BackendUnavailable, ContextOverflow, ResponseMalformed
from ..metrics.tokenize import tokenize
from .images import fit_image, to_data_url

DEFAULT_TEMPERATURE = 0.0


@dataclass
class BackendSpec:
    """One configured model endpoint."""

    name: str
    endpoint: str
    model_id: str
    kind: str = "chat"  # "chat" | "embedding"
    api_key_env: str | None = None
    request_timeout: float = 60.0
    max_retries: int = 2
    requests_per_second: float | None = None
    max_pixel: tuple[int, int] = (1024, 1024)
    min_pixel: tuple[int, int] = (128, 128)

    def __post_init__(self):
        if self.kind not in ("chat", "embedding"):
            raise ValueError(f"backend kind must be chat or embedding, got {self.kind!r}")
        if self.request_timeout <= 0:
            raise ValueError("request_timeout must be positive")
        if "://" not in self.endpoint:
            raise ValueError(f"endpoint {self.endpoint!r} is not a URL")

    @property
    def is_mock(self) -> bool:
        return self.endpoint.startswith("mock://")

    def api_key(self) -> str | None:
        return os.environ.get(self.api_key_env) if self.api_key_env else None

    @classmethod
    def from_dict(cls, name: str, d: dict) -> "BackendSpec":
        spec = dict(d)
        for key in ("max_pixel", "min_pixel"):
            if key in spec:
                spec[key] = tuple(spec[key])
        return cls(name=name, **spec)


@dataclass
class ChatTurn:
    role: str  # system | user | assistant | tool
    content: str
    images: list = field(default_factory=list)  # paths or raw bytes

    def __post_init__(self):
        if not self.content and not self.images:
            raise ValueError("a turn needs content or images")


@dataclass
class ChatResponse:
    text: str
    retries: int = 0
    latency_ms: float = 0.0


@dataclass
class EmbeddingVector:
    values: np.ndarray

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("embedding vector has non-finite entries")

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])


def _requests_transport(url: str, payload: dict, timeout: float, headers: dict):
    import requests

    try:
        resp = requests.post(url, json=payload, timeout=timeout, headers=headers)
    except requests.RequestException as exc:
        raise ConnectionError(str(exc)) from exc
    try:
        body = resp.json()
    except ValueError:
        body = resp.text
    return resp.status_code, body


class _RateLimiter:
    def __init__(self):
        self._lock = threading.Lock()
        self._next_at: dict[str, float] = {}

    def wait(self, backend: BackendSpec) -> None:
        if not backend.requests_per_second:
            return
        interval = 1.0 / backend.requests_per_second
        with self._lock:
            now = time.monotonic()
            start = max(now, self._next_at.get(backend.name, now))
            self._next_at[backend.name] = start + interval
        delay = start - now
        if delay > 0:
            time.sleep(delay)


class Gateway:
    """Stateless-per-request client with retry, rate limiting, and mocks."""

    def __init__(self, transport=None, backoff_base: float = 0.5):
        self._transport = transport or _requests_transport
        self._backoff_base = backoff_base
        self._limiter = _RateLimiter()
        self._chat_scripts: dict[str, object] = {}
        self._embedders: dict[str, object] = {}
        self.mock_log: list[dict] = []

    # -- mock wiring ----------------------------------------------------

    def register_script(self, backend_name: str, script) -> None:
        """Attach a scripted responder for a mock:// chat backend.

        ``script`` is either a list of canned replies (consumed in order)
        or a callable(turns, params) -> str.
        """
        self._chat_scripts[backend_name] = script

    def register_embedder(self, backend_name: str, embedder) -> None:
        self._embedders[backend_name] = embedder

    def _scripted_reply(self, backend: BackendSpec, turns, params) -> str:
        script = self._chat_scripts.get(backend.name)
        if script is None:
            raise BackendUnavailable(f"no script registered for mock backend {backend.name!r}")
        self.mock_log.append(
            {"backend": backend.name, "turns": [t.content for t in turns], "params": params}
        )
        if callable(script):
            return script(turns, params)
        if not script:
            raise BackendUnavailable(f"mock script for {backend.name!r} exhausted")
        return script.pop(0)

    # -- chat -----------------------------------------------------------

    def chat(
        self,
        backend: BackendSpec,
        turns: list[ChatTurn],
        params: dict | None = None,
    ) -> ChatResponse:
        """Send a chat request and return the first choice's content.

        Transient failures (connection errors, 429, 5xx) are retried up
        to ``backend.max_retries`` with exponential backoff.
        """
        if backend.kind != "chat":
            raise ValueError(f"backend {backend.name!r} is not a chat backend")
        params = dict(params or {})
        started = time.monotonic()
        if backend.is_mock:
            text = self._scripted_reply(backend, turns, params)
            return ChatResponse(text=text, latency_ms=(time.monotonic() - started) * 1e3)

        payload = {
            "model": backend.model_id,
            "messages": [self._wire_turn(backend, t) for t in turns],
            "temperature": params.get("temperature", DEFAULT_TEMPERATURE),
        }
        if "max_tokens" in params:
            payload["max_tokens"] = params["max_tokens"]
        headers = {"Content-Type": "application/json"}
        key = backend.api_key()
        if key:
            headers["Authorization"] = f"Bearer {key}"

        last_error: Exception | None = None
        for attempt in range(backend.max_retries + 1):
            self._limiter.wait(backend)
            try:
                status, body = self._transport(
                    backend.endpoint, payload, backend.request_timeout, headers
                )
            except ConnectionError as exc:
                last_error = exc
                self._sleep(attempt)
                continue
            if status == 429 or status >= 500:
                last_error = BackendUnavailable(f"status {status}")
                self._sleep(attempt)
                continue
            if status == 400 and self._looks_like_overflow(body):
                raise ContextOverflow(str(body)[:200])
            if not isinstance(body, dict):
                raise ResponseMalformed(f"non-JSON response: {str(body)[:200]}")
            try:
                text = body["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError) as exc:
                raise ResponseMalformed(f"unexpected response shape: {exc}") from exc
            return ChatResponse(
                text=text,
                retries=attempt,
                latency_ms=(time.monotonic() - started) * 1e3,
            )
        raise BackendUnavailable(str(last_error))

    def _wire_turn(self, backend: BackendSpec, turn: ChatTurn) -> dict:
        if not turn.images:
            return {"role": turn.role, "content": turn.content}
        content = [{"type": "text", "text": turn.content}] if turn.content else []
        for image in turn.images:
            img = fit_image(image, min_px=backend.min_pixel, max_px=backend.max_pixel)
            content.append({"type": "image_url", "image_url": {"url": to_data_url(img)}})
        return {"role": turn.role, "content": content}

    @staticmethod
    def _looks_like_overflow(body) -> bool:
        text = json.dumps(body) if isinstance(body, dict) else str(body)
        text = text.lower()
        return "context" in text and ("length" in text or "token" in text or "window" in text)

    def _sleep(self, attempt: int) -> None:
        if self._backoff_base > 0:
            time.sleep(self._backoff_base * (2**attempt))

    # -- embeddings -----------------------------------------------------

    def embed_tokens(self, backend: BackendSpec, text: str) -> list[EmbeddingVector]:
        """One vector per tokenizer token; empty text yields an empty list.

        Backends exposing per-token vectors are used as-is; otherwise each
        word from the shared tokenizer is embedded via the pooled route.
        """
        if backend.kind != "embedding":
            raise ValueError(f"backend {backend.name!r} is not an embedding backend")
        if backend.is_mock:
            embedder = self._embedders.get(backend.name)
            if embedder is None:
                raise BackendUnavailable(f"no embedder registered for {backend.name!r}")
            return [EmbeddingVector(v) for v in embedder.token_vectors(text)]
        if not text.strip():
            return []
        body = self._embed_request(backend, text)
        first = body["data"][0] if body.get("data") else {}
        if isinstance(first.get("token_embeddings"), list):
            vectors = [np.asarray(v, dtype=float) for v in first["token_embeddings"]]
        else:
            words = tokenize(text)
            if not words:
                return []
            body = self._embed_request(backend, words)
            vectors = [np.asarray(item["embedding"], dtype=float) for item in body["data"]]
        dims = {v.shape[0] for v in vectors}
        if len(dims) > 1:
            raise ResponseMalformed(f"inconsistent embedding dims {sorted(dims)}")
        return [EmbeddingVector(v) for v in vectors]

    def embed_sentence(self, backend: BackendSpec, text: str) -> np.ndarray:
        if backend.is_mock:
            embedder = self._embedders.get(backend.name)
            if embedder is None:
                raise BackendUnavailable(f"no embedder registered for {backend.name!r}")
            return embedder.sentence_vector(text)
        body = self._embed_request(backend, text)
        try:
            return np.asarray(body["data"][0]["embedding"], dtype=float)
        except (KeyError, IndexError, TypeError) as exc:
            raise ResponseMalformed(f"unexpected embedding response: {exc}") from exc

    def _embed_request(self, backend: BackendSpec, input_value) -> dict:
        headers = {"Content-Type": "application/json"}
        key = backend.api_key()
        if key:
            headers["Authorization"] = f"Bearer {key}"
        payload = {"model": backend.model_id, "input": input_value}
        last_error: Exception | None = None
        for attempt in range(backend.max_retries + 1):
            self._limiter.wait(backend)
            try:
                status, body = self._transport(
                    backend.endpoint, payload, backend.request_timeout, headers
                )
            except ConnectionError as exc:
                last_error = exc
                self._sleep(attempt)
                continue
            if status == 429 or status >= 500:
                last_error = BackendUnavailable(f"status {status}")
                self._sleep(attempt)
                continue
            if not isinstance(body, dict) or "data" not in body:
                raise ResponseMalformed(f"unexpected embedding response: {str(body)[:200]}")
            return body
        raise BackendUnavailable(str(last_error))
