"""Semantic metrics: sentence cosine, token-embedding F1, and unigram
alignment with a fragmentation penalty.

Embedding-based metrics take any embedder exposing ``token_vectors`` and
``sentence_vector``. Pairwise cosines are clamped to [0, 1] so every
metric shares the same range, and bitwise-identical vectors score
exactly 1.0 (identity must be exact, not within float noise).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .tokenize import tokenize

METEOR_ALPHA = 0.9
METEOR_BETA = 3.0
METEOR_GAMMA = 0.5

# exact chunk-minimal alignment is exponential in principle; beyond this
# reference length fall back to in-order greedy alignment
_EXACT_ALIGN_LIMIT = 14


def _clamped_cosine(u: np.ndarray, v: np.ndarray) -> float:
    if np.array_equal(u, v):
        return 1.0
    nu, nv = float(np.linalg.norm(u)), float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    value = float(np.dot(u, v)) / (nu * nv)
    return min(1.0, max(0.0, value))


def cosine_sim(reference: str, candidate: str, embedder) -> float:
    """Clamped cosine between sentence embeddings."""
    u = np.asarray(embedder.sentence_vector(reference), dtype=float)
    v = np.asarray(embedder.sentence_vector(candidate), dtype=float)
    return _clamped_cosine(u, v)


def embedding_f1(reference: str, candidate: str, embedder) -> float:
    """Greedy token-match F1 over embedding cosines.

    Precision averages each candidate token's best match against the
    reference tokens; recall is symmetric; either side empty scores 0.
    """
    ref_vecs = [np.asarray(v, dtype=float) for v in embedder.token_vectors(reference)]
    cand_vecs = [np.asarray(v, dtype=float) for v in embedder.token_vectors(candidate)]
    if not ref_vecs or not cand_vecs:
        return 0.0
    sims = np.array([[_clamped_cosine(c, r) for r in ref_vecs] for c in cand_vecs])
    precision = float(np.mean(np.max(sims, axis=1)))
    recall = float(np.mean(np.max(sims, axis=0)))
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _match_count(cand: list[str], ref: list[str]) -> int:
    from collections import Counter

    cc, rc = Counter(cand), Counter(ref)
    return sum(min(c, rc[w]) for w, c in cc.items())


def _min_chunks_exact(cand: list[str], ref: list[str], total_matches: int) -> int:
    """Fewest chunks over all maximum-cardinality exact alignments.

    DP over (candidate position, used-reference bitmask, reference index
    matched by the previous candidate position). Feasible because the
    reference side is capped before calling.
    """
    positions: dict[str, list[int]] = {}
    for j, w in enumerate(ref):
        positions.setdefault(w, []).append(j)
    n = len(cand)

    unmatched = -2  # sentinel distinct from any j - 1

    @lru_cache(maxsize=None)
    def go(i: int, mask: int, prev_j: int) -> tuple[int, int]:
        # returns (-matches, chunks), minimized lexicographically
        if i == n:
            return (0, 0)
        best = go(i + 1, mask, unmatched)  # leave candidate i unmatched
        for j in positions.get(cand[i], ()):  # match candidate i to ref j
            bit = 1 << j
            if mask & bit:
                continue
            sub = go(i + 1, mask | bit, j)
            new_chunk = 0 if prev_j == j - 1 else 1
            option = (sub[0] - 1, sub[1] + new_chunk)
            if option < best:
                best = option
        return best

    matches, chunks = go(0, 0, unmatched)
    go.cache_clear()
    assert -matches == total_matches
    return chunks


def _min_chunks_greedy(cand: list[str], ref: list[str]) -> int:
    """Chunk count of the leftmost in-order alignment (long-text fallback)."""
    used = [False] * len(ref)
    pairs: list[tuple[int, int]] = []
    for i, w in enumerate(cand):
        for j, r in enumerate(ref):
            if not used[j] and r == w:
                used[j] = True
                pairs.append((i, j))
                break
    chunks = 0
    prev = None
    for i, j in pairs:
        if prev is None or not (i == prev[0] + 1 and j == prev[1] + 1):
            chunks += 1
        prev = (i, j)
    return chunks


def meteor(reference: str, candidate: str) -> float:
    """Unigram-alignment score with a fragmentation penalty.

    Exact-match stage only: matches are the maximum unigram alignment;
    the chunk count is the fewest contiguous runs among such alignments.
    F_mean weights recall over precision (alpha), and the penalty is
    gamma * (chunks / matches) ** beta.
    """
    ref, cand = tokenize(reference), tokenize(candidate)
    if not ref or not cand:
        return 0.0
    matches = _match_count(cand, ref)
    if matches == 0:
        return 0.0
    precision = matches / len(cand)
    recall = matches / len(ref)
    f_mean = precision * recall / (METEOR_ALPHA * precision + (1 - METEOR_ALPHA) * recall)

    if len(ref) <= _EXACT_ALIGN_LIMIT:
        chunks = _min_chunks_exact(cand, ref, matches)
    else:
        chunks = _min_chunks_greedy(cand, ref)
    penalty = METEOR_GAMMA * (chunks / matches) ** METEOR_BETA
    return f_mean * (1.0 - penalty)
