"""Threshold selection from labelled score triples.

Every point of a per-dimension candidate grid is evaluated with the full
cascaded decision; the point with the best balanced accuracy wins. Ties go to
the higher negative-set accuracy, then to the lexicographically smallest
thresholds.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .config import CalibrationError, ScoringConfig, Thresholds
from .maps import load_map
from .scoring import DEFAULT_CONFIG, QualityScores, score
from .synth import ABSENT, PRESENT

LABELS = (PRESENT, ABSENT)
_LABEL_ALIASES = {
    "present": PRESENT,
    "target_present": PRESENT,
    "absent": ABSENT,
    "target_absent": ABSENT,
}


def normalize_label(label: str) -> str:
    try:
        return _LABEL_ALIASES[str(label).lower()]
    except KeyError:
        raise CalibrationError(f"unknown label {label!r}; expected 'present' or 'absent'") from None


def default_grid() -> list[float]:
    """0.0, 0.025, ..., 1.0 (41 points)."""
    return [i / 40 for i in range(41)]


@dataclass(frozen=True)
class ManifestEntry:
    path: Path
    label: str
    split: str | None = None

    @property
    def sample_id(self) -> str:
        return self.path.name


def read_manifest(path: str | Path, split: str | None = None) -> list[ManifestEntry]:
    """Load a labelled manifest; map paths are resolved against its directory."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise CalibrationError(f"cannot read manifest {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise CalibrationError(f"manifest {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise CalibrationError(f"manifest {path} must be a JSON list")
    entries = []
    for i, item in enumerate(data):
        if not isinstance(item, dict) or "path" not in item or "label" not in item:
            raise CalibrationError(f"manifest {path} entry {i} needs 'path' and 'label'")
        entry = ManifestEntry(path.parent / item["path"], normalize_label(item["label"]), item.get("split"))
        if split is None or entry.split == split:
            entries.append(entry)
    return entries


def _require_both_classes(labels: Sequence[str]) -> None:
    present = sum(1 for lab in labels if lab == PRESENT)
    if present == 0 or present == len(labels):
        raise CalibrationError(
            f"need at least one sample of each class, got {present} present / {len(labels) - present} absent"
        )


def score_samples(samples, config: ScoringConfig = DEFAULT_CONFIG) -> list[tuple[QualityScores, str]]:
    """Score ``(map_or_scores, label)`` pairs, preserving order.

    Each sample's first item may be a 2-D map, a path to a map file, or an
    already computed :class:`QualityScores`.
    """
    samples = list(samples)
    labels = [normalize_label(lab) for _, lab in samples]
    if not samples:
        raise CalibrationError("no samples to score")
    _require_both_classes(labels)
    out = []
    for (item, _), lab in zip(samples, labels):
        if isinstance(item, QualityScores):
            out.append((item, lab))
        elif isinstance(item, (str, Path)):
            out.append((score(load_map(item), config), lab))
        else:
            out.append((score(item, config), lab))
    return out


@dataclass(frozen=True, eq=False)
class CalibrationResult:
    thresholds: Thresholds
    objective_value: float
    positive_acc: float
    negative_acc: float
    trace_thresholds: np.ndarray
    trace_positive_acc: np.ndarray
    trace_negative_acc: np.ndarray

    @property
    def grid_trace(self) -> list[tuple[Thresholds, float, float]]:
        """One ``(thresholds, positive_acc, negative_acc)`` record per grid point."""
        return [
            (Thresholds(*map(float, t)), float(p), float(n))
            for t, p, n in zip(self.trace_thresholds, self.trace_positive_acc, self.trace_negative_acc)
        ]

    def to_dict(self, include_trace: bool = False) -> dict:
        out = {
            "thresholds": self.thresholds.to_dict(),
            "objective_value": self.objective_value,
            "positive_acc": self.positive_acc,
            "negative_acc": self.negative_acc,
            "grid_points": int(len(self.trace_thresholds)),
        }
        if include_trace:
            out["grid_trace"] = [
                {"thresholds": list(map(float, t)), "positive_acc": float(p), "negative_acc": float(n)}
                for t, p, n in zip(self.trace_thresholds, self.trace_positive_acc, self.trace_negative_acc)
            ]
        return out


def _pass_counts(values: np.ndarray, grids: list[np.ndarray]) -> np.ndarray:
    """Count samples passing all three thresholds at every grid point.

    Returns an array of shape ``(len(g_s), len(g_c), len(g_p))``.
    """
    ps, pc, pp = (
        (values[:, d][None, :] >= g[:, None]).astype(np.int64) for d, g in enumerate(grids)
    )
    both = ps[:, None, :] * pc[None, :, :]
    return np.einsum("scn,pn->scp", both, pp)


def calibrate(
    scored: Iterable[tuple[QualityScores, str]],
    grid: Sequence[Sequence[float]] | Sequence[float] | None = None,
) -> CalibrationResult:
    """Grid search over thresholds maximising balanced accuracy.

    ``grid`` is either one candidate list shared by all three dimensions or a
    triple of lists (strength, compactness, purity).
    """
    scored = list(scored)
    if not scored:
        raise CalibrationError("no scored samples")
    labels = [normalize_label(lab) for _, lab in scored]
    _require_both_classes(labels)

    if grid is None:
        grids = [default_grid()] * 3
    elif len(grid) == 3 and all(isinstance(g, (list, tuple, np.ndarray)) for g in grid):
        grids = [list(g) for g in grid]
    else:
        grids = [list(grid)] * 3
    if any(len(g) == 0 for g in grids):
        raise CalibrationError("every grid dimension needs at least one candidate")
    grids = [np.asarray(g, dtype=np.float64) for g in grids]

    values = np.array([s.as_tuple() for s, _ in scored], dtype=np.float64)
    is_pos = np.array([lab == PRESENT for lab in labels])
    n_pos, n_neg = int(is_pos.sum()), int((~is_pos).sum())

    pos_pass = _pass_counts(values[is_pos], grids)
    neg_pass = _pass_counts(values[~is_pos], grids)
    pos_correct = pos_pass.ravel()
    neg_correct = n_neg - neg_pass.ravel()

    # balanced accuracy scaled by 2*n_pos*n_neg: exact integer comparison
    objective = pos_correct * n_neg + neg_correct * n_pos
    ts, tc, tp = np.meshgrid(*grids, indexing="ij")
    points = np.stack([ts.ravel(), tc.ravel(), tp.ravel()], axis=1)

    # lexsort: last key is primary
    order = np.lexsort((points[:, 2], points[:, 1], points[:, 0], -neg_correct, -objective))
    best = int(order[0])

    pos_acc = pos_correct / n_pos
    neg_acc = neg_correct / n_neg
    return CalibrationResult(
        thresholds=Thresholds(*map(float, points[best])),
        objective_value=float((pos_acc[best] + neg_acc[best]) / 2),
        positive_acc=float(pos_acc[best]),
        negative_acc=float(neg_acc[best]),
        trace_thresholds=points,
        trace_positive_acc=pos_acc,
        trace_negative_acc=neg_acc,
    )


def export_scatter(scored: Iterable[tuple[QualityScores, str]]) -> list[dict]:
    return [
        {"s1": s.strength, "s2": s.compactness, "s3": s.purity, "label": normalize_label(lab)}
        for s, lab in scored
    ]


def write_scatter_csv(records: list[dict], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["s1", "s2", "s3", "label"], lineterminator="\n")
        writer.writeheader()
        writer.writerows(records)
    return path


def parse_grid_spec(text: str) -> list[float]:
    """``"start:stop:step"`` (inclusive) or a comma-separated list."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0:
                raise CalibrationError("grid step must be positive")
            n = int(round((stop - start) / step))
            return [round(start + i * step, 12) for i in range(n + 1)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise CalibrationError(f"invalid grid spec {text!r}: {exc}") from exc
