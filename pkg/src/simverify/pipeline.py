"""Single-map verification: score, decide, optionally consult the assessor."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ScoringConfig, Thresholds, parse_mask
from .holistic import AssessorConfig, Transport, Verdict, assess, build_prompt, combine
from .render import DEFAULT_COLORMAP, DEFAULT_SCALE, render_heatmap
from .scoring import DEFAULT_CONFIG, decide, dimension_passes, score


@dataclass
class Assessor:
    """An assessor endpoint plus the transport used to reach it."""

    config: AssessorConfig
    transport: Transport
    scale: int = DEFAULT_SCALE
    colormap: str = DEFAULT_COLORMAP


def verify(
    response: np.ndarray,
    config: ScoringConfig = DEFAULT_CONFIG,
    thresholds: Thresholds = Thresholds(),
    mask=None,
    assessor: Assessor | None = None,
) -> Verdict:
    """Score one map and return the combined verdict.

    With ``assessor=None`` no request is made and the final decision equals
    the quantitative one.
    """
    dims = parse_mask(mask)
    scores = score(response, config)
    quantitative = decide(scores, thresholds, dims)
    holistic = None
    if assessor is not None:
        image = render_heatmap(response, assessor.scale, assessor.colormap)
        prompt = build_prompt(scores, thresholds, dims)
        holistic = assess(image, prompt, assessor.config, assessor.transport)
    final, rationale = combine(quantitative, holistic)
    return Verdict(
        quantitative_decision=quantitative,
        holistic=holistic,
        final_decision=final,
        rationale=rationale,
        scores=scores,
        passes=dimension_passes(scores, thresholds),
    )
