"""Configuration objects and error types shared across the package."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any


class VerificationError(ValueError):
    """Base class for input and configuration problems."""


class MapFormatError(VerificationError):
    """Raised when a response map cannot be ingested."""


class ConfigError(VerificationError):
    pass


class CalibrationError(VerificationError):
    pass


class GenerationError(VerificationError):
    pass


CONNECTIVITIES = ("four", "eight")
QUANTILE_METHODS = ("linear_interpolation", "nearest")


@dataclass(frozen=True)
class ScoringConfig:
    """Constants of the quality scorer.

    Attributes
    ----------
    rho : float
        Fraction of map entries averaged for the top-k strength.
    epsilon : float
        Stabiliser added to every denominator.
    alpha : float
        Quantile level over positive scores that sets the activation threshold.
    delta_min : float
        Floor for the activation threshold.
    tau_c : float
        Decay temperature of the compactness score.
    kernel_size : int
        Side of the box-averaging window (odd).
    connectivity : {"four", "eight"}
    quantile_method : {"linear_interpolation", "nearest"}
    """

    rho: float = 0.01
    epsilon: float = 1e-6
    alpha: float = 0.8
    delta_min: float = 0.2
    tau_c: float = 0.1
    kernel_size: int = 3
    connectivity: str = "eight"
    quantile_method: str = "linear_interpolation"

    def __post_init__(self) -> None:
        if not 0.0 < self.rho <= 1.0:
            raise ConfigError(f"rho must lie in (0, 1], got {self.rho}")
        if not self.epsilon > 0.0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.delta_min >= 0.0:
            raise ConfigError(f"delta_min must be non-negative, got {self.delta_min}")
        if not self.tau_c > 0.0:
            raise ConfigError(f"tau_c must be positive, got {self.tau_c}")
        if (
            isinstance(self.kernel_size, bool)
            or not isinstance(self.kernel_size, int)
            or self.kernel_size < 1
            or self.kernel_size % 2 == 0
        ):
            raise ConfigError(f"kernel_size must be an odd positive integer, got {self.kernel_size!r}")
        if self.connectivity not in CONNECTIVITIES:
            raise ConfigError(f"connectivity must be one of {CONNECTIVITIES}, got {self.connectivity!r}")
        if self.quantile_method not in QUANTILE_METHODS:
            raise ConfigError(
                f"quantile_method must be one of {QUANTILE_METHODS}, got {self.quantile_method!r}"
            )

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ScoringConfig":
        """Build a config from a mapping; absent keys take defaults, unknown keys are rejected."""
        if not isinstance(data, dict):
            raise ConfigError("scoring config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown scoring config field(s): {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | Path) -> "ScoringConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


DIMENSIONS = ("S", "C", "P")


@dataclass(frozen=True)
class Thresholds:
    """Per-dimension pass thresholds for strength, compactness and purity."""

    s_thr: float = 0.475
    c_thr: float = 0.4
    p_thr: float = 0.7

    def __post_init__(self) -> None:
        for name in ("s_thr", "c_thr", "p_thr"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")

    @classmethod
    def parse(cls, text: str) -> "Thresholds":
        """Parse ``"s,c,p"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ConfigError(f"thresholds must be three comma-separated numbers, got {text!r}")
        try:
            return cls(*(float(p) for p in parts))
        except ValueError as exc:
            raise ConfigError(f"invalid thresholds {text!r}: {exc}") from exc

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.s_thr, self.c_thr, self.p_thr)

    def to_dict(self) -> dict[str, float]:
        return {"S": self.s_thr, "C": self.c_thr, "P": self.p_thr}


def parse_mask(mask: str | set[str] | frozenset[str] | tuple[str, ...] | None) -> frozenset[str]:
    """Normalise a dimension mask such as ``"sc"`` or ``{"S", "P"}``.

    ``None`` means the full mask.
    """
    if mask is None:
        return frozenset(DIMENSIONS)
    items = list(mask.upper()) if isinstance(mask, str) else [str(m).upper() for m in mask]
    bad = sorted(set(items) - set(DIMENSIONS))
    if bad:
        raise ConfigError(f"unknown score dimension(s) in mask: {', '.join(bad)}")
    if not items:
        raise ConfigError("dimension mask must not be empty")
    return frozenset(items)


def mask_name(mask: frozenset[str]) -> str:
    return "".join(d for d in DIMENSIONS if d in mask)
