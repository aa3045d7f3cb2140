from .aggregate import MetricVector, ScoreReport, aggregate, compute_metrics, delta
from .judge import JudgeReport, judge_five_dim
from .lexical import bleu, rouge_l, word_overlap
from .semantic import cosine_sim, embedding_f1, meteor
from .tokenize import tokenize

__all__ = [
    "JudgeReport",
    "MetricVector",
    "ScoreReport",
    "aggregate",
    "bleu",
    "compute_metrics",
    "cosine_sim",
    "delta",
    "embedding_f1",
    "judge_five_dim",
    "meteor",
    "rouge_l",
    "tokenize",
    "word_overlap",
]
