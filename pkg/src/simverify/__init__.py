"""Training-free verification of target existence from segmentation similarity maps."""

__version__ = "0.1.0"

from .config import (  # noqa: E402
    CalibrationError,
    ConfigError,
    GenerationError,
    MapFormatError,
    ScoringConfig,
    Thresholds,
    VerificationError,
)
from .maps import as_response_map, load_map, save_map  # noqa: E402
from .scoring import (  # noqa: E402
    ActiveRegion,
    QualityScores,
    RobustStats,
    build_score_map,
    compute_robust_stats,
    decide,
    extract_active_region,
    region_purity,
    response_strength,
    score,
    spatial_compactness,
)
from .pipeline import Assessor, verify  # noqa: E402

__all__ = [
    "ActiveRegion",
    "Assessor",
    "CalibrationError",
    "ConfigError",
    "GenerationError",
    "MapFormatError",
    "QualityScores",
    "RobustStats",
    "ScoringConfig",
    "Thresholds",
    "VerificationError",
    "as_response_map",
    "build_score_map",
    "compute_robust_stats",
    "decide",
    "extract_active_region",
    "load_map",
    "region_purity",
    "response_strength",
    "save_map",
    "score",
    "spatial_compactness",
    "verify",
]
