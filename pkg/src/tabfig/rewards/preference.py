"""Preference filtering: keep candidates that strictly improve end to end.

A candidate plan or critique survives only if substituting it into the
pipeline improves all three aggregate scores (lexical, semantic, and
overall) strictly versus the baseline run. Candidates whose evaluation
fails are dropped and counted, not raised.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Callable

from ..metrics.aggregate import ScoreReport

log = logging.getLogger(__name__)


@dataclass
class PreferenceOutcome:
    kept: list = field(default_factory=list)
    dropped: list = field(default_factory=list)
    failed: list = field(default_factory=list)

    @property
    def counts(self) -> dict[str, int]:
        return {
            "kept": len(self.kept),
            "dropped": len(self.dropped),
            "failed": len(self.failed),
        }


def improves_strictly(candidate_report: ScoreReport, baseline_report: ScoreReport) -> bool:
    return (
        candidate_report.s_lex > baseline_report.s_lex
        and candidate_report.s_sem > baseline_report.s_sem
        and candidate_report.s_avg > baseline_report.s_avg
    )


def preference_filter(
    candidates: list,
    run_candidate: Callable[[object], ScoreReport],
    baseline_report: ScoreReport,
) -> PreferenceOutcome:
    """Evaluate each candidate through the pipeline and keep improvers."""
    outcome = PreferenceOutcome()
    for candidate in candidates:
        try:
            report = run_candidate(candidate)
        except Exception as exc:
            log.warning("candidate evaluation failed: %s", exc)
            outcome.failed.append(candidate)
            continue
        if improves_strictly(report, baseline_report):
            outcome.kept.append(candidate)
        else:
            outcome.dropped.append(candidate)
    return outcome


def write_preference_dataset(path, records: list[dict]) -> None:
    """Emit preference records as JSON Lines.

    Each record carries {prompt, options, gold_option_ids, provenance}.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            row = {
                "prompt": rec["prompt"],
                "options": rec["options"],
                "gold_option_ids": sorted(rec["gold_option_ids"]),
                "provenance": rec.get("provenance", ""),
            }
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
