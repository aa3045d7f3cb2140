"""Tunable bounds for corpus construction."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class PipelineThresholds:
    """Filtering and cleaning bounds applied during corpus construction.

    ``max_sources_per_query`` doubles for papers from ``double_year`` on,
    favoring recent work. Length bounds are token counts under the shared
    evaluation tokenizer.
    """

    min_year: int = 2023
    max_sources_per_query: int = 100
    double_year: int = 2025
    min_gold_len: int = 10
    max_gold_len: int = 2000
    max_context_len: int = 8000
    max_samples: int = 100000
    context_depth: int = 1
    require_caption: bool = False

    def __post_init__(self):
        for name in (
            "max_sources_per_query",
            "min_gold_len",
            "max_gold_len",
            "max_context_len",
            "max_samples",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.min_gold_len >= self.max_gold_len:
            raise ValueError("min_gold_len must be below max_gold_len")
        if self.context_depth < 0:
            raise ValueError("context_depth must be >= 0")

    def source_cap(self, year: int) -> int:
        """Per-query source cap; doubled for papers in or after double_year."""
        if year >= self.double_year:
            return 2 * self.max_sources_per_query
        return self.max_sources_per_query

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineThresholds":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in d.items() if k in known})
