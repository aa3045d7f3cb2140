"""Per-instance metric vectors, corpus aggregates, and performance deltas.

The lexical score averages the three lexical metrics, the semantic score
the three semantic ones, and the overall score all six; each is reported
as a percentage. Deltas against a baseline report come in absolute
(percentage points) and relative (percent of baseline) flavors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import DivisionByZeroBaseline, EmptyInput
from .lexical import bleu, rouge_l, word_overlap
from .semantic import cosine_sim, embedding_f1, meteor

METRIC_NAMES = ("cosine", "embedding_f1", "meteor", "rouge_l", "bleu", "word_overlap")
LEXICAL_METRICS = ("rouge_l", "bleu", "word_overlap")
SEMANTIC_METRICS = ("cosine", "embedding_f1", "meteor")


@dataclass
class MetricVector:
    """Six per-metric values in [0, 1] for one (gold, generated) pair."""

    rouge_l: float
    bleu: float
    word_overlap: float
    cosine: float
    embedding_f1: float
    meteor: float

    def __post_init__(self):
        for name in METRIC_NAMES:
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} out of range: {value}")

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}


def compute_metrics(gold: str, generated: str, embedder, bleu_n: int = 4) -> MetricVector:
    """All six metrics for one pair."""
    return MetricVector(
        rouge_l=rouge_l(gold, generated),
        bleu=bleu(gold, generated, n=bleu_n),
        word_overlap=word_overlap(gold, generated),
        cosine=cosine_sim(gold, generated, embedder),
        embedding_f1=embedding_f1(gold, generated, embedder),
        meteor=meteor(gold, generated),
    )


@dataclass
class ScoreReport:
    """Corpus-level scores: per-metric means plus the three aggregates."""

    per_instance: list[MetricVector]
    metric_means: dict[str, float]  # in [0, 1]
    s_lex: float  # percent
    s_sem: float  # percent
    s_avg: float  # percent
    delta_abs: float | None = None
    delta_rel: float | None = None
    instance_ids: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        out = {
            "metric_means": self.metric_means,
            "s_lex": self.s_lex,
            "s_sem": self.s_sem,
            "s_avg": self.s_avg,
            "per_instance": [v.as_dict() for v in self.per_instance],
        }
        if self.instance_ids:
            out["instance_ids"] = self.instance_ids
        if self.delta_abs is not None:
            out["delta_abs"] = self.delta_abs
        if self.delta_rel is not None:
            out["delta_rel"] = self.delta_rel
        return out


def scores_from_means(means: dict[str, float]) -> tuple[float, float, float]:
    """(S_Lex, S_Sem, S_Avg) percentages from per-metric means in [0, 1]."""
    s_lex = 100.0 * sum(means[m] for m in LEXICAL_METRICS) / 3.0
    s_sem = 100.0 * sum(means[m] for m in SEMANTIC_METRICS) / 3.0
    s_avg = 100.0 * sum(means[m] for m in METRIC_NAMES) / 6.0
    return s_lex, s_sem, s_avg


def aggregate(vectors: list[MetricVector], instance_ids: list[str] | None = None) -> ScoreReport:
    """Average per-instance vectors into corpus means and final scores."""
    if not vectors:
        raise EmptyInput("no metric vectors to aggregate")
    means = {
        name: sum(getattr(v, name) for v in vectors) / len(vectors) for name in METRIC_NAMES
    }
    s_lex, s_sem, s_avg = scores_from_means(means)
    return ScoreReport(
        per_instance=list(vectors),
        metric_means=means,
        s_lex=s_lex,
        s_sem=s_sem,
        s_avg=s_avg,
        instance_ids=list(instance_ids or []),
    )


def delta(ours: float, baseline: float) -> dict[str, float]:
    """Absolute and relative performance difference versus a baseline."""
    result = {"delta_abs": ours - baseline}
    if baseline == 0:
        raise DivisionByZeroBaseline("relative delta undefined for zero baseline")
    result["delta_rel"] = (ours - baseline) / baseline * 100.0
    return result



def summary_table(report: ScoreReport) -> str:
    """Plain-text score table in the standard column order."""
    headers = ["Cosine", "BERT", "Meteor", "Rouge-L", "Bleu", "Word", "S_Sem", "S_Lex", "S_Avg"]
    means = report.metric_means
    values = [
        100 * means["cosine"],
        100 * means["embedding_f1"],
        100 * means["meteor"],
        100 * means["rouge_l"],
        100 * means["bleu"],
        100 * means["word_overlap"],
        report.s_sem,
        report.s_lex,
        report.s_avg,
    ]
    widths = [max(len(h), 7) for h in headers]
    head = "  ".join(h.rjust(w) for h, w in zip(headers, widths))
    row = "  ".join(f"{v:.2f}".rjust(w) for v, w in zip(values, widths))
    return f"{head}\n{row}"
