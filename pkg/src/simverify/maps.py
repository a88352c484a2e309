"""Response-map ingestion and serialisation.

Two on-disk grids are understood:

* JSON: ``{"height": H, "width": W, "data": [row-major numbers]}``
* CSV: H lines of W comma-separated numbers, no header.

Maps are held in memory as 2-D ``float64`` arrays.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .config import MapFormatError


def as_response_map(values: Any, height: int | None = None, width: int | None = None) -> np.ndarray:
    """Validate ``values`` and return it as an H x W float64 array.

    A flat sequence needs ``height`` and ``width``; a nested one or a 2-D
    array carries its own shape.
    """
    try:
        arr = np.asarray(values, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise MapFormatError(f"map values are not numeric: {exc}") from exc
    if height is not None or width is not None:
        if height is None or width is None:
            raise MapFormatError("height and width must be given together")
        if arr.ndim != 1:
            arr = arr.ravel()
        if arr.size != height * width:
            raise MapFormatError(
                f"map has {arr.size} values but height*width = {height}*{width} = {height * width}"
            )
        arr = arr.reshape(height, width)
    if arr.ndim != 2:
        raise MapFormatError(f"map must be two-dimensional, got shape {arr.shape}")
    h, w = arr.shape
    if h < 2 or w < 2:
        raise MapFormatError(f"map must be at least 2x2, got {h}x{w}")
    if not np.all(np.isfinite(arr)):
        raise MapFormatError("map contains non-finite values (NaN or Inf)")
    return np.ascontiguousarray(arr)


def parse_json_grid(obj: Any) -> np.ndarray:
    if not isinstance(obj, dict):
        raise MapFormatError("JSON grid must be an object with height, width and data")
    missing = [k for k in ("height", "width", "data") if k not in obj]
    if missing:
        raise MapFormatError(f"JSON grid is missing field(s): {', '.join(missing)}")
    h, w, data = obj["height"], obj["width"], obj["data"]
    for name, v in (("height", h), ("width", w)):
        if isinstance(v, bool) or not isinstance(v, int) or v <= 0:
            raise MapFormatError(f"{name} must be a positive integer, got {v!r}")
    if not isinstance(data, list) or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in data):
        raise MapFormatError("data must be a flat list of numbers")
    return as_response_map(data, h, w)


def loads_json_grid(text: str | bytes) -> np.ndarray:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MapFormatError(f"invalid JSON: {exc}") from exc
    return parse_json_grid(obj)


def loads_csv_grid(text: str) -> np.ndarray:
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            rows.append([float(cell) for cell in row])
        except ValueError as exc:
            raise MapFormatError(f"line {lineno}: {exc}") from exc
    if not rows:
        raise MapFormatError("CSV grid is empty")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise MapFormatError(f"CSV rows have differing lengths: {sorted(widths)}")
    return as_response_map(rows)


def load_map(path: str | Path) -> np.ndarray:
    """Read a response map from a ``.json`` or ``.csv`` file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise MapFormatError(f"cannot read map file {path}: {exc.strerror or exc}") from exc
    try:
        if path.suffix.lower() == ".csv":
            return loads_csv_grid(text)
        return loads_json_grid(text)
    except MapFormatError as exc:
        raise MapFormatError(f"{path}: {exc}") from exc


def to_json_grid(arr: np.ndarray) -> dict[str, Any]:
    arr = np.asarray(arr, dtype=np.float64)
    h, w = arr.shape
    return {"height": int(h), "width": int(w), "data": [float(v) for v in arr.ravel()]}


def dumps_json_grid(arr: np.ndarray) -> str:
    return json.dumps(to_json_grid(arr), separators=(",", ":"))


def save_map(arr: np.ndarray, path: str | Path) -> Path:
    """Write ``arr`` as a JSON grid, or CSV when the suffix is ``.csv``."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        lines = [",".join(repr(float(v)) for v in row) for row in np.asarray(arr, dtype=np.float64)]
        path.write_text("\n".join(lines) + "\n")
    else:
        path.write_text(dumps_json_grid(arr))
    return path


def finite_or_none(x: float) -> float | None:
    """JSON has no infinity; report it as null."""
    return None if not math.isfinite(x) else float(x)
