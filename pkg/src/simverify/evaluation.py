"""Accuracy evaluation over a labelled manifest, with dimension ablation."""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .calibration import ManifestEntry, _require_both_classes
from .config import DIMENSIONS, ScoringConfig, Thresholds, mask_name, parse_mask
from .maps import load_map
from .pipeline import Assessor, verify
from .scoring import DEFAULT_CONFIG, QualityScores, decide
from .synth import PRESENT

ALL_MASKS = [
    frozenset(c) for r in (1, 2, 3) for c in itertools.combinations(DIMENSIONS, r)
]


@dataclass(frozen=True)
class SampleRecord:
    sample_id: str
    scores: QualityScores
    quantitative: bool
    holistic: str | None
    final: bool
    label: str

    @property
    def correct(self) -> bool:
        return self.final == (self.label == PRESENT)

    def to_dict(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "scores": self.scores.to_dict(),
            "quantitative": self.quantitative,
            "holistic": self.holistic,
            "final": self.final,
            "label": self.label,
        }


@dataclass(frozen=True)
class EvaluationReport:
    mask: str
    positive_acc: float
    negative_acc: float
    overall_acc: float
    n_positive: int
    n_negative: int
    records: list[SampleRecord] = field(default_factory=list, repr=False)

    @classmethod
    def from_records(cls, records: list[SampleRecord], mask: str = "SCP") -> "EvaluationReport":
        _require_both_classes([r.label for r in records])
        pos = [r for r in records if r.label == PRESENT]
        neg = [r for r in records if r.label != PRESENT]
        pos_ok = sum(r.correct for r in pos)
        neg_ok = sum(r.correct for r in neg)
        return cls(
            mask=mask,
            positive_acc=pos_ok / len(pos),
            negative_acc=neg_ok / len(neg),
            overall_acc=(pos_ok + neg_ok) / len(records),
            n_positive=len(pos),
            n_negative=len(neg),
            records=records,
        )

    def row(self) -> dict:
        return {
            "mask": self.mask,
            "S": "S" in self.mask,
            "C": "C" in self.mask,
            "P": "P" in self.mask,
            "positive_acc": self.positive_acc,
            "negative_acc": self.negative_acc,
            "overall_acc": self.overall_acc,
            "n_positive": self.n_positive,
            "n_negative": self.n_negative,
        }

    def to_dict(self, include_records: bool = True) -> dict:
        out = self.row()
        if include_records:
            out["records"] = [r.to_dict() for r in self.records]
        return out


def _verify_entry(entry: ManifestEntry, config, thresholds, dims, assessor) -> SampleRecord:
    v = verify(load_map(entry.path), config, thresholds, dims, assessor)
    return SampleRecord(
        sample_id=entry.sample_id,
        scores=v.scores,
        quantitative=v.quantitative_decision,
        holistic=None if v.holistic is None else v.holistic.decision,
        final=v.final_decision,
        label=entry.label,
    )


def evaluate(
    entries: list[ManifestEntry],
    config: ScoringConfig = DEFAULT_CONFIG,
    thresholds: Thresholds = Thresholds(),
    mask=None,
    assessor: Assessor | None = None,
    workers: int | None = None,
) -> EvaluationReport:
    """Verify every manifest entry and aggregate per-class accuracy."""
    dims = parse_mask(mask)
    _require_both_classes([e.label for e in entries])
    if workers is None:
        workers = os.cpu_count() or 1
    if assessor is not None:
        workers = min(workers, assessor.config.max_in_flight)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        records = list(pool.map(lambda e: _verify_entry(e, config, thresholds, dims, assessor), entries))
    return EvaluationReport.from_records(records, mask_name(dims))


def ablate(report: EvaluationReport, thresholds: Thresholds = Thresholds()) -> list[EvaluationReport]:
    """Re-decide the scored records of ``report`` under each of the 7 non-empty masks.

    Scores are reused, so only the quantitative path is ablated; final equals
    quantitative in every row.
    """
    rows = []
    for dims in ALL_MASKS:
        recs = []
        for r in report.records:
            q = decide(r.scores, thresholds, dims)
            recs.append(SampleRecord(r.sample_id, r.scores, q, None, q, r.label))
        rows.append(EvaluationReport.from_records(recs, mask_name(dims)))
    return rows
