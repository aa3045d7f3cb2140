"""The lowercase angle-bracket tag protocol structuring agent responses.

Every agent reply encloses its sections in ``<tag>...</tag>`` pairs.
Extraction takes the first occurrence of each tag, matches nested
same-name pairs to the outermost close (inner markup preserved
verbatim), and ignores any prose outside the requested tags.
"""

from __future__ import annotations

from ..errors import TagError


def extract_tag(text: str, tag: str) -> str | None:
    """Content of the first balanced ``<tag>...</tag>`` pair, or None.

    Raises TagError("unbalanced") when an opening tag never closes.
    """
    open_tok, close_tok = f"<{tag}>", f"</{tag}>"
    start = text.find(open_tok)
    if start < 0:
        return None
    pos = start + len(open_tok)
    depth = 1
    while depth:
        next_open = text.find(open_tok, pos)
        next_close = text.find(close_tok, pos)
        if next_close < 0:
            raise TagError("unbalanced", tag)
        if 0 <= next_open < next_close:
            depth += 1
            pos = next_open + len(open_tok)
        else:
            depth -= 1
            pos = next_close + len(close_tok)
    return text[start + len(open_tok) : pos - len(close_tok)]


def parse_tags(text: str, required: list[str]) -> dict[str, str]:
    """Extract every required tag or raise TagError(missing|unbalanced)."""
    out: dict[str, str] = {}
    for tag in required:
        content = extract_tag(text, tag)
        if content is None:
            raise TagError("missing", tag)
        out[tag] = content
    return out


def has_tags(text: str, required: list[str]) -> bool:
    try:
        parse_tags(text, required)
    except TagError:
        return False
    return True
