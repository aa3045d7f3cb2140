"""Lexical metrics: LCS ratio, n-gram precision, and word-set overlap.

All three operate on the shared lowercase word tokenization. The LCS
ratio normalizes by the longer sequence, which makes it symmetric in its
arguments (deliberately so; see the aggregate score definitions).
"""

from __future__ import annotations

import math
from collections import Counter

from .tokenize import tokenize

_EPSILON = 1e-9


def lcs_length(a: list[str], b: list[str]) -> int:
    """Longest common subsequence length, O(len(a)*len(b))."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[-1]))
        prev = cur
    return prev[-1]


def rouge_l(reference: str, candidate: str) -> float:
    """LCS token length over the longer token length.

    Both empty -> 1.0; exactly one empty -> 0.0.
    """
    ref, cand = tokenize(reference), tokenize(candidate)
    if not ref and not cand:
        return 1.0
    if not ref or not cand:
        return 0.0
    return lcs_length(ref, cand) / max(len(ref), len(cand))


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(reference: str, candidate: str, n: int = 4, weights: list[float] | None = None) -> float:
    """Geometric n-gram precision with a brevity penalty.

    Uniform weights by default. Orders with no candidate n-grams are
    dropped (weights renormalized over the rest), so identical short
    texts still score 1.0; zero-match precisions are floored at a small
    epsilon instead of collapsing the whole product.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if weights is not None and abs(sum(weights) - 1.0) > 1e-9:
        raise ValueError("weights must sum to 1")
    ref, cand = tokenize(reference), tokenize(candidate)
    if not cand:
        return 0.0
    if weights is None:
        weights = [1.0 / n] * n

    weighted_logs: list[tuple[float, float]] = []
    for order in range(1, n + 1):
        cand_counts = _ngrams(cand, order)
        total = sum(cand_counts.values())
        if total == 0:
            continue
        ref_counts = _ngrams(ref, order)
        matched = sum(min(c, ref_counts[g]) for g, c in cand_counts.items())
        p = matched / total if matched else _EPSILON
        weighted_logs.append((weights[order - 1], math.log(p)))
    if not weighted_logs:
        return 0.0
    weight_sum = sum(w for w, _ in weighted_logs)
    geo = math.exp(sum(w * lp for w, lp in weighted_logs) / weight_sum)

    r, c = len(ref), len(cand)
    bp = 1.0 if c >= r else math.exp(1.0 - r / c)
    return min(1.0, bp * geo)


def word_overlap(reference: str, candidate: str) -> float:
    """Jaccard similarity between the unique word sets."""
    ref, cand = set(tokenize(reference)), set(tokenize(candidate))
    if not ref and not cand:
        return 1.0
    union = ref | cand
    return len(ref & cand) / len(union)


def rouge_l_f(reference: str, candidate: str) -> float:
    """Conventional LCS F-measure, for diagnostics alongside the
    max-normalized ratio reported by :func:`rouge_l`."""
    ref, cand = tokenize(reference), tokenize(candidate)
    if not ref and not cand:
        return 1.0
    if not ref or not cand:
        return 0.0
    lcs = lcs_length(ref, cand)
    if lcs == 0:
        return 0.0
    precision, recall = lcs / len(cand), lcs / len(ref)
    return 2 * precision * recall / (precision + recall)
