"""Exception types shared across the toolkit."""


class TabfigError(Exception):
    """Base class for all toolkit errors."""


class MalformedSource(TabfigError):
    """Document source cannot be parsed (unbalanced environments, bad markup)."""


class NotFound(TabfigError):
    """A referenced document, instance, or file handle does not exist."""


class UnknownTarget(TabfigError):
    """Context retrieval target is not a node of the reference graph."""


class BackendUnavailable(TabfigError):
    """Model backend unreachable after retries."""


class ResponseMalformed(TabfigError):
    """Backend returned a response the client cannot interpret."""


class ContextOverflow(TabfigError):
    """Backend rejected the request for exceeding its context window.

    Callers should truncate their context block and retry.
    """


class TagError(TabfigError):
    """Tagged response section missing or unbalanced."""

    def __init__(self, kind: str, tag: str):
        super().__init__(f"{kind} tag <{tag}>")
        self.kind = kind  # "missing" | "unbalanced"
        self.tag = tag


class JudgeUnparseable(TabfigError):
    """Judge response had no usable grades after retry."""


class EmptyGold(TabfigError):
    """Gold option set is empty."""


class EmptyReference(TabfigError):
    """Reference text is empty where a nonempty one is required."""


class GroupTooSmall(TabfigError):
    """Advantage normalization needs at least two samples."""


class EmptyInput(TabfigError):
    """Aggregation over an empty collection."""


class DivisionByZeroBaseline(TabfigError):
    """Relative delta undefined for a zero baseline."""


class IdMismatch(TabfigError):
    """Generated and gold instance ids do not align."""

    def __init__(self, missing: list, extra: list):
        super().__init__(f"missing={sorted(missing)} extra={sorted(extra)}")
        self.missing = sorted(missing)
        self.extra = sorted(extra)
