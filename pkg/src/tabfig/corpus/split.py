"""Train/eval partitioning with reproducible downsampling.

The eval side holds only instances from the configured evaluation year.
Downsampling is keyed by (seed, instance_id) through a counter-based
hash, so membership is stable across reruns and independent of input
order or parallel sharding.
"""

from __future__ import annotations

import hashlib

from .build import AnalysisInstance


def _sample_key(seed: int, instance_id: str) -> int:
    digest = hashlib.sha256(f"{seed}:{instance_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def split_eval(
    instances: list[AnalysisInstance],
    eval_year: int,
    seed: int = 0,
    max_eval: int | None = None,
) -> tuple[list[AnalysisInstance], list[AnalysisInstance]]:
    """Partition instances into (train, eval).

    Eval = instances from ``eval_year``, downsampled to ``max_eval`` by
    keyed-hash order when a cap is given. Everything else, including
    eval-year instances not sampled, goes to train.
    """
    candidates = [inst for inst in instances if inst.year == eval_year]
    if max_eval is not None and len(candidates) > max_eval:
        candidates.sort(key=lambda inst: _sample_key(seed, inst.instance_id))
        chosen = set(inst.instance_id for inst in candidates[:max_eval])
    else:
        chosen = {inst.instance_id for inst in candidates}

    train = [inst for inst in instances if inst.instance_id not in chosen]
    eval_set = [inst for inst in instances if inst.instance_id in chosen]
    return train, eval_set
