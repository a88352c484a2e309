"""Heatmap rasterisation of response maps.

Colour tables are 256-entry uint8 lookups built once from fixed
piecewise-linear anchor points, so output bytes never depend on a plotting
library being installed.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .maps import as_response_map

# anchors (x, value) per channel; "jet" follows the classic blue-cyan-yellow-red ramp
_SEGMENTS = {
    "jet": (
        ((0.0, 0.0), (0.35, 0.0), (0.66, 1.0), (0.89, 1.0), (1.0, 0.5)),
        ((0.0, 0.0), (0.125, 0.0), (0.375, 1.0), (0.64, 1.0), (0.91, 0.0), (1.0, 0.0)),
        ((0.0, 0.5), (0.11, 1.0), (0.34, 1.0), (0.65, 0.0), (1.0, 0.0)),
    ),
    "gray": (
        ((0.0, 0.0), (1.0, 1.0)),
        ((0.0, 0.0), (1.0, 1.0)),
        ((0.0, 0.0), (1.0, 1.0)),
    ),
}


def _build_lut(channels) -> np.ndarray:
    x = np.linspace(0.0, 1.0, 256)
    lut = np.empty((256, 3), dtype=np.uint8)
    for c, anchors in enumerate(channels):
        xs, ys = zip(*anchors)
        lut[:, c] = np.round(np.interp(x, xs, ys) * 255.0).astype(np.uint8)
    lut.setflags(write=False)
    return lut


COLORMAPS: dict[str, np.ndarray] = {name: _build_lut(seg) for name, seg in _SEGMENTS.items()}
DEFAULT_COLORMAP = "jet"
DEFAULT_SCALE = 16


@dataclass(frozen=True, eq=False)
class HeatmapImage:
    pixel_width: int
    pixel_height: int
    png: bytes
    colormap_name: str
    value_range: tuple[float, float]
    degenerate: bool
    rgb: np.ndarray

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_bytes(self.png)
        return path


def normalize(response: np.ndarray) -> tuple[np.ndarray, tuple[float, float], bool]:
    """Min-max scale to [0, 1]; a constant map maps to all zeros and is flagged."""
    lo, hi = float(response.min()), float(response.max())
    if hi > lo:
        return (response - lo) / (hi - lo), (lo, hi), False
    return np.zeros_like(response, dtype=np.float64), (lo, hi), True


def colorize(unit: np.ndarray, colormap: str = DEFAULT_COLORMAP) -> np.ndarray:
    if colormap not in COLORMAPS:
        raise ValueError(f"unknown colormap {colormap!r}; available: {', '.join(sorted(COLORMAPS))}")
    idx = np.clip((unit * 256).astype(np.int64), 0, 255)
    return COLORMAPS[colormap][idx]


def encode_png(rgb: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(rgb, dtype=np.uint8)).save(
        buf, format="PNG", optimize=False, compress_level=6
    )
    return buf.getvalue()


def render_heatmap(response: np.ndarray, scale: int = DEFAULT_SCALE, colormap: str = DEFAULT_COLORMAP) -> HeatmapImage:
    """Colour-map ``response`` and upscale each cell to a ``scale`` x ``scale`` block."""
    if isinstance(scale, bool) or not isinstance(scale, (int, np.integer)) or scale < 1:
        raise ValueError(f"scale must be a positive integer, got {scale!r}")
    m = as_response_map(response)
    unit, value_range, degenerate = normalize(m)
    rgb = colorize(unit, colormap)
    rgb = np.repeat(np.repeat(rgb, scale, axis=0), scale, axis=1)
    return HeatmapImage(
        pixel_width=int(rgb.shape[1]),
        pixel_height=int(rgb.shape[0]),
        png=encode_png(rgb),
        colormap_name=colormap,
        value_range=value_range,
        degenerate=degenerate,
        rgb=rgb,
    )
