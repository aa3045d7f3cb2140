"""Environment-level LaTeX parsing.

Scans balanced ``\\begin{env}``/``\\end{env}`` pairs for the float and
equation environments we extract, segments the remaining prose into
sections and paragraphs, and records ``\\ref``/``\\cite`` arguments as
outgoing references. Bodies keep their markup verbatim; no TeX expansion
is attempted.
"""

from __future__ import annotations

import logging
import re

from ..errors import MalformedSource
from .model import DocElement

log = logging.getLogger(__name__)

# Environments extracted as typed elements (starred variants included).
ENV_KINDS = {
    "table": "table",
    "table*": "table",
    "figure": "figure",
    "figure*": "figure",
    "equation": "equation",
    "equation*": "equation",
    "align": "equation",
    "align*": "equation",
}
# Float-style environments we recognize but do not type; their text stays
# in the surrounding prose.
SKIPPED_ENVS = {"sidewaystable", "sidewaysfigure", "wraptable", "wrapfigure"}

_BEGIN_END = re.compile(r"\\(begin|end)\{([A-Za-z*]+)\}")
_SECTION = re.compile(r"\\(section|subsection|subsubsection)\*?\s*\{")
_LABEL = re.compile(r"\\label\{([^}]+)\}")
_GRAPHICS = re.compile(r"\\includegraphics(?:\[[^\]]*\])?\{([^}]+)\}")
_REF = re.compile(r"\\(?:ref|eqref|autoref|cref|Cref|pageref)\{([^}]+)\}")
_CITE = re.compile(
    r"\\(?:cite|citep|citet|citealp|citealt|autocite|textcite|parencite|footcite)"
    r"(?:\[[^\]]*\])*\{([^}]+)\}"
)
_BIBITEM = re.compile(r"\\bibitem(?:\[[^\]]*\])?\{([^}]+)\}")

_KIND_PREFIX = {
    "section": "sec",
    "table": "tbl",
    "figure": "fig",
    "equation": "eq",
    "paragraph": "par",
    "bib_entry": "bib",
}


def _balanced_arg(text: str, open_brace: int) -> str | None:
    """Return the content of the brace group opening at ``open_brace``."""
    depth = 0
    for i in range(open_brace, len(text)):
        c = text[i]
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                return text[open_brace + 1 : i]
    return None


def _extract_caption(body: str) -> str | None:
    pos = body.find(r"\caption")
    if pos < 0:
        return None
    brace = body.find("{", pos)
    if brace < 0:
        return None
    return _balanced_arg(body, brace)


def collect_refs(text: str, own_label: str | None = None) -> list[str]:
    """All \\ref/\\cite targets in ``text``, in order, without duplicates."""
    refs: list[str] = []
    seen: set[str] = set()
    spans = [(m.start(), m.group(1), False) for m in _REF.finditer(text)]
    spans += [(m.start(), m.group(1), True) for m in _CITE.finditer(text)]
    for _, arg, multi in sorted(spans):
        keys = [k.strip() for k in arg.split(",")] if multi else [arg.strip()]
        for key in keys:
            if key and key != own_label and key not in seen:
                seen.add(key)
                refs.append(key)
    return refs


def _scan_environments(raw: str) -> list[tuple[str, int, int]]:
    """Top-level spans of tracked environments as (env, start, end).

    Raises MalformedSource on unbalanced or crossed tracked environments.
    """
    tracked = set(ENV_KINDS) | {"thebibliography"}
    stack: list[tuple[str, int]] = []
    spans: list[tuple[str, int, int]] = []
    for m in _BEGIN_END.finditer(raw):
        word, env = m.group(1), m.group(2)
        if env in SKIPPED_ENVS and word == "begin":
            log.debug("skipping untyped float environment %r", env)
        if env not in tracked:
            continue
        if word == "begin":
            stack.append((env, m.start()))
        else:
            if not stack or stack[-1][0] != env:
                raise MalformedSource(f"\\end{{{env}}} without matching \\begin")
            name, start = stack.pop()
            if not stack:  # only top-level environments become elements
                spans.append((name, start, m.end()))
    if stack:
        raise MalformedSource(f"unclosed environment {stack[-1][0]!r}")
    return spans


def parse_latex_elements(raw: str) -> list[DocElement]:
    """Parse LaTeX source into an ordered element list."""
    env_spans = _scan_environments(raw)
    bib_span = next((s for s in env_spans if s[0] == "thebibliography"), None)
    float_spans = [(e, s, t) for e, s, t in env_spans if e != "thebibliography"]

    counters: dict[str, int] = {}

    def new_id(kind: str) -> str:
        counters[kind] = counters.get(kind, 0) + 1
        return f"{_KIND_PREFIX[kind]}-{counters[kind]:04d}"

    pending: list[tuple[int, DocElement]] = []

    for env, start, end in float_spans:
        kind = ENV_KINDS[env]
        body = raw[start:end]
        label_m = _LABEL.search(body)
        label = label_m.group(1) if label_m else None
        caption = _extract_caption(body)
        image_m = _GRAPHICS.search(body)
        el = DocElement(
            element_id=new_id(kind),
            kind=kind,
            body=body,
            label=label,
            caption=caption,
            image_ref=image_m.group(1) if image_m else None,
            outgoing_refs=collect_refs(body, own_label=label),
            span=(start, end),
        )
        pending.append((start, el))

    if bib_span:
        _, bstart, bend = bib_span
        bib_text = raw[bstart:bend]
        items = list(_BIBITEM.finditer(bib_text))
        for i, m in enumerate(items):
            istart = bstart + m.start()
            iend = bstart + (items[i + 1].start() if i + 1 < len(items) else len(bib_text))
            el = DocElement(
                element_id=new_id("bib_entry"),
                kind="bib_entry",
                body=raw[istart:iend],
                label=m.group(1),
                span=(istart, iend),
            )
            pending.append((istart, el))

    # Prose = everything outside extracted environments.
    masked_spans = sorted(
        [(s, e) for _, s, e in float_spans] + ([(bib_span[1], bib_span[2])] if bib_span else [])
    )

    def in_masked(pos: int) -> bool:
        return any(s <= pos < e for s, e in masked_spans)

    headings = [m for m in _SECTION.finditer(raw) if not in_masked(m.start())]
    for i, m in enumerate(headings):
        start = m.start()
        end = headings[i + 1].start() if i + 1 < len(headings) else len(raw)
        title = _balanced_arg(raw, m.end() - 1) or ""
        body = raw[start:end]
        label_m = _LABEL.search(body)
        el = DocElement(
            element_id=new_id("section"),
            kind="section",
            body=body,
            label=label_m.group(1) if label_m else None,
            caption=title,
            outgoing_refs=collect_refs(body, own_label=label_m.group(1) if label_m else None),
            span=(start, end),
        )
        pending.append((start, el))

    for pstart, pend in _prose_regions(raw, masked_spans, headings):
        chunk = raw[pstart:pend]
        if not chunk.strip():
            continue
        el = DocElement(
            element_id=new_id("paragraph"),
            kind="paragraph",
            body=chunk,
            outgoing_refs=collect_refs(chunk),
            span=(pstart, pend),
        )
        pending.append((pstart, el))

    pending.sort(key=lambda p: (p[0], -(p[1].span[1])))
    return [el for _, el in pending]


_BLANK_LINE = re.compile(r"\n[ \t]*\n")


def _prose_regions(
    raw: str,
    masked_spans: list[tuple[int, int]],
    headings: list[re.Match],
) -> list[tuple[int, int]]:
    """Blank-line separated prose chunks outside environments and headings.

    Heading lines themselves stay out of paragraphs (they already head the
    enclosing section element); nothing else is dropped.
    """
    cut: list[tuple[int, int]] = list(masked_spans)
    for m in headings:
        arg_end = raw.find("}", m.end())
        cut.append((m.start(), (arg_end + 1) if arg_end >= 0 else m.end()))
    cut.sort()

    regions: list[tuple[int, int]] = []
    pos = 0
    for s, e in cut:
        if s > pos:
            regions.append((pos, s))
        pos = max(pos, e)
    if pos < len(raw):
        regions.append((pos, len(raw)))

    chunks: list[tuple[int, int]] = []
    for rstart, rend in regions:
        text = raw[rstart:rend]
        last = 0
        for m in _BLANK_LINE.finditer(text):
            chunks.append((rstart + last, rstart + m.start()))
            last = m.end()
        chunks.append((rstart + last, rend))
    return [(s, e) for s, e in chunks if raw[s:e].strip()]
