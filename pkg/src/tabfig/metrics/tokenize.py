"""Shared tokenizer: lowercase Unicode words, punctuation stripped.

One tokenizer across lexical metrics, length rewards, and corpus length
bookkeeping keeps the reported numbers comparable.
"""

from __future__ import annotations

import re

_WORD = re.compile(r"\w+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Split text into lowercase word tokens, dropping punctuation."""
    return _WORD.findall(text.lower())


def token_count(text: str) -> int:
    return len(tokenize(text))
