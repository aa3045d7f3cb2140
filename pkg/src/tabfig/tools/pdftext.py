"""Minimal PDF text extraction: FlateDecode streams + text operators.

Covers the common case of PDFs whose content streams are plain or
zlib-compressed and whose text is drawn with Tj/TJ/quote operators.
Anything fancier (CID fonts with custom maps, object streams) yields
whatever literal strings are recoverable; full PDF semantics are out of
scope.
"""

from __future__ import annotations

import re
import zlib

_STREAM = re.compile(rb"<<(.*?)>>\s*stream\r?\n(.*?)\r?\nendstream", re.DOTALL)
_TEXT_BLOCK = re.compile(rb"BT(.*?)ET", re.DOTALL)
_SHOW_TEXT = re.compile(rb"\((?:\\.|[^\\()])*\)\s*(?:Tj|'|\")|\[(?:[^\]]*)\]\s*TJ", re.DOTALL)
_PAREN_STRING = re.compile(rb"\((?:\\.|[^\\()])*\)", re.DOTALL)

_ESCAPES = {
    b"n": b"\n",
    b"r": b"\r",
    b"t": b"\t",
    b"b": b"\b",
    b"f": b"\f",
    b"(": b"(",
    b")": b")",
    b"\\": b"\\",
}


def _decode_literal(raw: bytes) -> bytes:
    out = bytearray()
    i = 0
    while i < len(raw):
        c = raw[i : i + 1]
        if c == b"\\" and i + 1 < len(raw):
            nxt = raw[i + 1 : i + 2]
            if nxt in _ESCAPES:
                out += _ESCAPES[nxt]
                i += 2
                continue
            if nxt.isdigit():  # octal escape, up to 3 digits
                j = i + 1
                while j < len(raw) and j < i + 4 and raw[j : j + 1].isdigit():
                    j += 1
                out.append(int(raw[i + 1 : j], 8) & 0xFF)
                i = j
                continue
            i += 2
            continue
        out += c
        i += 1
    return bytes(out)


def _stream_text(content: bytes) -> str:
    pieces: list[str] = []
    for block in _TEXT_BLOCK.findall(content) or [content]:
        for m in _SHOW_TEXT.finditer(block):
            for s in _PAREN_STRING.findall(m.group(0)):
                decoded = _decode_literal(s[1:-1])
                pieces.append(decoded.decode("latin-1", errors="replace"))
        if pieces and not pieces[-1].endswith("\n"):
            pieces.append("\n")
    return "".join(pieces)


def extract_pdf_text(data: bytes) -> str:
    """Best-effort text extraction from raw PDF bytes."""
    if not data.startswith(b"%PDF"):
        raise ValueError("not a PDF file")
    texts: list[str] = []
    for m in _STREAM.finditer(data):
        header, stream = m.group(1), m.group(2)
        if b"FlateDecode" in header:
            try:
                stream = zlib.decompress(stream)
            except zlib.error:
                continue
        if b"BT" in stream or b"Tj" in stream or b"TJ" in stream:
            text = _stream_text(stream)
            if text.strip():
                texts.append(text)
    return "\n".join(texts)
