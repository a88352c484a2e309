"""Similarity-response quality scoring.

A response map ``M`` (similarity between the segmentation token and every
image-grid feature) is summarised by three scores:

strength
    sigmoid of the robustly normalised top-k mean,
compactness
    ``exp(-d / tau_c)`` where ``d`` is the score-weighted spread of the
    active region around its weighted centre, over the grid diagonal,
purity
    share of active score energy held by the dominant connected component.

A target is judged present when every selected score meets its threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .config import DIMENSIONS, ScoringConfig, Thresholds, parse_mask
from .maps import as_response_map, finite_or_none

DEFAULT_CONFIG = ScoringConfig()

_NUMPY_QUANTILE = {"linear_interpolation": "linear", "nearest": "nearest"}

_STRUCTURES = {
    "four": ndimage.generate_binary_structure(2, 1),
    "eight": ndimage.generate_binary_structure(2, 2),
}


@dataclass(frozen=True)
class RobustStats:
    q50: float
    q95: float

    @property
    def band(self) -> float:
        return self.q95 - self.q50


@dataclass(frozen=True, eq=False)
class ActiveRegion:
    """Pixels of the score map at or above the activation threshold.

    ``labels`` is 0 outside the region and ``1..n_components`` inside,
    numbered in raster order of each component's first pixel.
    """

    threshold_used: float
    mask: np.ndarray
    labels: np.ndarray
    n_components: int

    @property
    def pixels(self) -> set[tuple[int, int]]:
        return {(int(i), int(j)) for i, j in zip(*np.nonzero(self.mask))}

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    @property
    def empty(self) -> bool:
        return self.size == 0


@dataclass(frozen=True)
class QualityScores:
    strength: float
    compactness: float
    purity: float
    m_top: float
    r_s: float
    spread_d: float
    active_pixel_count: int
    component_count: int
    q50: float = field(default=0.0)
    q95: float = field(default=0.0)
    delta: float = field(default=0.0)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.strength, self.compactness, self.purity)

    def by_dimension(self) -> dict[str, float]:
        return {"S": self.strength, "C": self.compactness, "P": self.purity}

    def to_dict(self) -> dict:
        return {
            "strength": self.strength,
            "compactness": self.compactness,
            "purity": self.purity,
            "m_top": self.m_top,
            "r_s": self.r_s,
            "spread_d": finite_or_none(self.spread_d),
            "active_pixel_count": self.active_pixel_count,
            "component_count": self.component_count,
            "q50": self.q50,
            "q95": self.q95,
            "delta": self.delta,
        }


def _quantile(values: np.ndarray, q: float, method: str) -> float:
    return float(np.quantile(values, q, method=_NUMPY_QUANTILE[method]))


def compute_robust_stats(response: np.ndarray, config: ScoringConfig = DEFAULT_CONFIG) -> RobustStats:
    """Median and 95th percentile over every entry of the raw map."""
    m = as_response_map(response)
    flat = m.ravel()
    return RobustStats(
        q50=_quantile(flat, 0.50, config.quantile_method),
        q95=_quantile(flat, 0.95, config.quantile_method),
    )


def _sigmoid(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def response_strength(
    response: np.ndarray, stats: RobustStats, config: ScoringConfig = DEFAULT_CONFIG
) -> tuple[float, float, float]:
    """Return ``(s1, m_top, r_s)``."""
    flat = np.asarray(response, dtype=np.float64).ravel()
    k = max(1, math.floor(config.rho * flat.size))
    # value descending, then row-major index: a total order, so ties are deterministic
    order = np.argsort(-flat, kind="stable")[:k]
    m_top = float(flat[order].mean())
    r_s = max(0.0, (m_top - stats.q50) / (stats.band + config.epsilon))
    return _sigmoid(r_s), m_top, r_s


def box_average(arr: np.ndarray, size: int) -> np.ndarray:
    """Mean over a ``size`` x ``size`` window with replicated edges.

    Summed from shifted views rather than a running sum so that windows
    holding only zeros come out exactly zero.
    """
    if size == 1:
        return np.array(arr, dtype=np.float64, copy=True)
    r = size // 2
    padded = np.pad(arr, r, mode="edge")
    h, w = arr.shape
    out = np.zeros((h, w), dtype=np.float64)
    for di in range(size):
        for dj in range(size):
            out += padded[di : di + h, dj : dj + w]
    return out / (size * size)


def build_score_map(
    response: np.ndarray, stats: RobustStats, config: ScoringConfig = DEFAULT_CONFIG
) -> np.ndarray:
    """Clip the normalised map at zero and box-smooth it."""
    m = np.asarray(response, dtype=np.float64)
    raw = np.maximum(0.0, (m - stats.q50) / (stats.band + config.epsilon))
    return box_average(raw, config.kernel_size)


def label_components(mask: np.ndarray, connectivity: str = "eight") -> tuple[np.ndarray, int]:
    labels, n = ndimage.label(mask, structure=_STRUCTURES[connectivity])
    return labels, int(n)


def extract_active_region(score_map: np.ndarray, config: ScoringConfig = DEFAULT_CONFIG) -> ActiveRegion:
    positive = score_map[score_map > 0]
    if positive.size:
        delta = max(_quantile(positive, config.alpha, config.quantile_method), config.delta_min)
    else:
        delta = config.delta_min
    mask = score_map >= delta
    # with delta_min == 0 and nothing positive, zero pixels would pass; they carry no evidence
    mask &= score_map > 0
    labels, n = label_components(mask, config.connectivity)
    return ActiveRegion(threshold_used=float(delta), mask=mask, labels=labels, n_components=n)


def spatial_compactness(
    score_map: np.ndarray, region: ActiveRegion, config: ScoringConfig = DEFAULT_CONFIG
) -> tuple[float, float]:
    """Return ``(s2, d)``; an empty region gives ``(0.0, inf)``."""
    if region.empty:
        return 0.0, math.inf
    h, w = score_map.shape
    rows, cols = np.nonzero(region.mask)
    weights = score_map[rows, cols]
    total = weights.sum()
    coords = np.stack([rows, cols], axis=1).astype(np.float64)
    center = (weights[:, None] * coords).sum(axis=0) / (total + config.epsilon)
    dist = np.sqrt(((coords - center) ** 2).sum(axis=1))
    diag = math.hypot(h, w)
    d = float((weights * dist).sum() / (total * diag + config.epsilon))
    return math.exp(-d / config.tau_c), d


def component_sums(score_map: np.ndarray, region: ActiveRegion) -> np.ndarray:
    """Score energy of each component, indexed ``label - 1``."""
    if region.n_components == 0:
        return np.zeros(0)
    return np.bincount(region.labels.ravel(), weights=score_map.ravel(), minlength=region.n_components + 1)[1:]


def region_purity(score_map: np.ndarray, region: ActiveRegion, config: ScoringConfig = DEFAULT_CONFIG) -> float:
    if region.empty:
        return 0.0
    sums = component_sums(score_map, region)
    # argmax keeps the first maximum, i.e. the component whose first pixel comes earliest
    dominant = sums[int(np.argmax(sums))]
    total = float(score_map[region.mask].sum())
    return float(dominant / (total + config.epsilon))


def score(response: np.ndarray, config: ScoringConfig = DEFAULT_CONFIG) -> QualityScores:
    """Run the full scorer on one response map."""
    m = as_response_map(response)
    stats = compute_robust_stats(m, config)
    s1, m_top, r_s = response_strength(m, stats, config)
    smap = build_score_map(m, stats, config)
    region = extract_active_region(smap, config)
    s2, d = spatial_compactness(smap, region, config)
    s3 = region_purity(smap, region, config)
    return QualityScores(
        strength=s1,
        compactness=s2,
        purity=s3,
        m_top=m_top,
        r_s=r_s,
        spread_d=d,
        active_pixel_count=region.size,
        component_count=region.n_components,
        q50=stats.q50,
        q95=stats.q95,
        delta=region.threshold_used,
    )


def dimension_passes(scores: QualityScores, thresholds: Thresholds) -> dict[str, bool]:
    values = scores.by_dimension()
    limits = thresholds.to_dict()
    return {d: values[d] >= limits[d] for d in DIMENSIONS}


def decide(scores: QualityScores, thresholds: Thresholds = Thresholds(), mask=None) -> bool:
    """True when every dimension in ``mask`` meets its threshold.

    ``mask`` is any subset of ``{"S", "C", "P"}`` (or a string like ``"sc"``);
    ``None`` selects all three.
    """
    dims = parse_mask(mask)
    passes = dimension_passes(scores, thresholds)
    return all(passes[d] for d in DIMENSIONS if d in dims)
