"""Embedder implementations behind one small protocol.

Metrics take any object with ``token_vectors(text)`` and
``sentence_vector(text)``. The hash stub keeps metric tests offline:
each token maps to a deterministic pseudo-random unit vector keyed by
the token string, so identical runs are bit-identical.
"""

from __future__ import annotations

import hashlib

import numpy as np

from ..metrics.tokenize import tokenize


class HashEmbedder:
    """Deterministic offline embedder: token -> seeded unit vector."""

    def __init__(self, dim: int = 16):
        self.dim = dim
        self._cache: dict[str, np.ndarray] = {}

    def _vector(self, token: str) -> np.ndarray:
        vec = self._cache.get(token)
        if vec is None:
            seed = int.from_bytes(hashlib.sha256(token.encode("utf-8")).digest()[:8], "big")
            rng = np.random.Generator(np.random.PCG64(seed))
            vec = rng.standard_normal(self.dim)
            vec /= np.linalg.norm(vec)
            self._cache[token] = vec
        return vec

    def token_vectors(self, text: str) -> list[np.ndarray]:
        return [self._vector(tok) for tok in tokenize(text)]

    def sentence_vector(self, text: str) -> np.ndarray:
        vectors = self.token_vectors(text)
        if not vectors:
            return np.zeros(self.dim)
        return np.mean(vectors, axis=0)


class MappingEmbedder:
    """Fixed token -> vector table, for exact-arithmetic tests."""

    def __init__(self, table: dict[str, list[float]], dim: int | None = None):
        self.table = {k: np.asarray(v, dtype=float) for k, v in table.items()}
        self.dim = dim or (len(next(iter(self.table.values()))) if self.table else 2)

    def token_vectors(self, text: str) -> list[np.ndarray]:
        return [self.table[tok] for tok in tokenize(text) if tok in self.table]

    def sentence_vector(self, text: str) -> np.ndarray:
        vectors = self.token_vectors(text)
        if not vectors:
            return np.zeros(self.dim)
        return np.mean(vectors, axis=0)


class GatewayEmbedder:
    """Adapter exposing a gateway embedding backend as an Embedder."""

    def __init__(self, gateway, backend):
        self.gateway = gateway
        self.backend = backend

    def token_vectors(self, text: str) -> list[np.ndarray]:
        return [ev.values for ev in self.gateway.embed_tokens(self.backend, text)]

    def sentence_vector(self, text: str) -> np.ndarray:
        return self.gateway.embed_sentence(self.backend, text)
