"""Seeded synthetic response maps in the two regimes a verifier must tell apart.

``concentrated`` maps carry one Gaussian bump (target present); ``scattered``
maps carry isolated single-pixel spikes and ``fragmented`` maps carry several
well separated bumps (both target absent). Every map is a pure function of its
:class:`SyntheticSpec`; randomness comes from numpy's PCG64 bit generator so
files reproduce across platforms.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import GenerationError
from .maps import save_map

RNG_ALGORITHM = "numpy.random.PCG64"
KINDS = ("concentrated", "scattered", "fragmented")
PRESENT, ABSENT = "present", "absent"
_MAX_PLACEMENT_TRIES = 1000


@dataclass(frozen=True)
class SyntheticSpec:
    kind: str = "concentrated"
    height: int = 24
    width: int = 24
    peak: float = 1.0
    sigma: float = 2.0
    spike_count: int = 30
    noise_floor: float = 0.05
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise GenerationError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.height < 2 or self.width < 2:
            raise GenerationError(f"grid must be at least 2x2, got {self.height}x{self.width}")
        if not self.peak > 0:
            raise GenerationError(f"peak must be positive, got {self.peak}")
        if not self.sigma > 0:
            raise GenerationError(f"sigma must be positive, got {self.sigma}")
        if self.spike_count < 1:
            raise GenerationError(f"spike_count must be >= 1, got {self.spike_count}")
        if self.noise_floor < 0:
            raise GenerationError(f"noise_floor must be non-negative, got {self.noise_floor}")
        if not 0 <= self.seed < 2**64:
            raise GenerationError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    @property
    def label(self) -> str:
        return label_for(self.kind)

    @classmethod
    def from_dict(cls, data: dict) -> "SyntheticSpec":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise GenerationError(f"unknown spec field(s): {', '.join(sorted(unknown))}")
        return cls(**data)


def label_for(kind: str) -> str:
    return PRESENT if kind == "concentrated" else ABSENT


def _gaussian(h: int, w: int, center: tuple[int, int], sigma: float, peak: float) -> np.ndarray:
    ii, jj = np.mgrid[0:h, 0:w]
    r2 = (ii - center[0]) ** 2 + (jj - center[1]) ** 2
    return peak * np.exp(-r2 / (2.0 * sigma * sigma))


def _center_range(n: int, sigma: float) -> tuple[int, int]:
    margin = math.ceil(sigma)
    lo, hi = margin, n - 1 - margin
    if lo > hi:
        raise GenerationError(f"sigma={sigma} leaves no room for a bump centre on an axis of {n} cells")
    return lo, hi


def _random_center(rng: np.random.Generator, spec: SyntheticSpec) -> tuple[int, int]:
    r0, r1 = _center_range(spec.height, spec.sigma)
    c0, c1 = _center_range(spec.width, spec.sigma)
    return int(rng.integers(r0, r1 + 1)), int(rng.integers(c0, c1 + 1))


def bump_center(spec: SyntheticSpec) -> tuple[int, int]:
    """Centre of the single bump of a concentrated spec."""
    if spec.kind != "concentrated":
        raise GenerationError("only concentrated specs have a single bump centre")
    return _random_center(np.random.Generator(np.random.PCG64(spec.seed)), spec)


def generate(spec: SyntheticSpec) -> tuple[np.ndarray, str]:
    """Return ``(map, label)`` for ``spec``."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    h, w = spec.height, spec.width

    if spec.kind == "concentrated":
        m = _gaussian(h, w, _random_center(rng, spec), spec.sigma, spec.peak)
    elif spec.kind == "scattered":
        if spec.spike_count > h * w:
            raise GenerationError(f"{spec.spike_count} spikes do not fit on a {h}x{w} grid")
        m = np.zeros((h, w))
        idx = rng.choice(h * w, size=spec.spike_count, replace=False)
        m.flat[idx] = spec.peak
    else:
        if not 2 <= spec.spike_count <= 4:
            raise GenerationError(f"fragmented maps need 2-4 bumps, got spike_count={spec.spike_count}")
        min_sep = 4.0 * spec.sigma
        centers: list[tuple[int, int]] = []
        for _ in range(_MAX_PLACEMENT_TRIES):
            c = _random_center(rng, spec)
            if all(math.dist(c, o) >= min_sep for o in centers):
                centers.append(c)
                if len(centers) == spec.spike_count:
                    break
        else:
            raise GenerationError(
                f"cannot place {spec.spike_count} bumps {min_sep:g} px apart on a {h}x{w} grid"
            )
        m = np.zeros((h, w))
        for c in centers:
            m = np.maximum(m, _gaussian(h, w, c, spec.sigma, spec.peak))

    if spec.noise_floor > 0:
        m = m + rng.uniform(0.0, spec.noise_floor, size=(h, w))
    return m, spec.label


def derive_seeds(base_seed: int, n: int) -> list[int]:
    """``n`` independent 64-bit seeds from one base seed."""
    state = np.random.SeedSequence(base_seed).generate_state(n, dtype=np.uint64)
    return [int(s) for s in state]


def default_specs(n_present: int, n_absent: int, base_seed: int = 0, absent_kind: str = "scattered", **overrides) -> list[SyntheticSpec]:
    seeds = derive_seeds(base_seed, n_present + n_absent)
    specs = [SyntheticSpec(kind="concentrated", seed=s, **overrides) for s in seeds[:n_present]]
    specs += [SyntheticSpec(kind=absent_kind, seed=s, **overrides) for s in seeds[n_present:]]
    if absent_kind == "fragmented" and "spike_count" not in overrides:
        specs = [replace(s, spike_count=3) if s.kind == "fragmented" else s for s in specs]
    return specs


def generate_corpus(
    specs: list[SyntheticSpec],
    out_dir: str | Path,
    splits: list[str] | None = None,
    manifest_name: str = "manifest.json",
) -> Path:
    """Write one JSON grid per spec plus a labelled manifest; return the manifest path.

    Manifest entries hold ``path`` (relative to the manifest) and ``label``,
    plus the generating ``kind``, ``seed``, ``split``, generator version and
    RNG algorithm.
    """
    if not specs:
        raise GenerationError("at least one spec is required")
    if splits is not None and len(splits) != len(specs):
        raise GenerationError("splits must match specs one-to-one")
    out_dir = Path(out_dir)
    try:
        (out_dir / "maps").mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise GenerationError(f"cannot create corpus directory {out_dir}: {exc}") from exc

    width = max(4, len(str(len(specs) - 1)))
    entries = []
    for i, spec in enumerate(specs):
        m, label = generate(spec)
        rel = f"maps/{i:0{width}d}_{spec.kind}.json"
        try:
            save_map(m, out_dir / rel)
        except OSError as exc:
            raise GenerationError(f"cannot write map {out_dir / rel}: {exc}") from exc
        entry = {
            "path": rel,
            "label": label,
            "kind": spec.kind,
            "seed": spec.seed,
            "spec": asdict(spec),
            "generator": f"simverify {__version__}",
            "rng": RNG_ALGORITHM,
        }
        if splits is not None:
            entry["split"] = splits[i]
        entries.append(entry)

    manifest = out_dir / manifest_name
    try:
        manifest.write_text(json.dumps(entries, indent=1, sort_keys=True) + "\n")
    except OSError as exc:
        raise GenerationError(f"cannot write manifest {manifest}: {exc}") from exc
    return manifest


def corpus_hash(manifest: str | Path) -> str:
    """SHA-256 over the manifest and every map it lists."""
    manifest = Path(manifest)
    digest = hashlib.sha256(manifest.read_bytes())
    for entry in json.loads(manifest.read_text()):
        digest.update((manifest.parent / entry["path"]).read_bytes())
    return digest.hexdigest()


PRESETS = ("default", "full-scale", "fragmented")


def preset_specs(name: str, base_seed: int = 0) -> tuple[list[SyntheticSpec], list[str] | None]:
    """Named corpora.

    ``default``
        200 concentrated + 200 scattered 24x24 maps.
    ``full-scale``
        a 200/200 calibration split and a 278/740 test split.
    ``fragmented``
        200 concentrated + 200 fragmented maps.
    """
    if name == "default":
        return default_specs(200, 200, base_seed), None
    if name == "fragmented":
        return default_specs(200, 200, base_seed, absent_kind="fragmented"), None
    if name == "full-scale":
        cal = default_specs(200, 200, base_seed)
        test = default_specs(278, 740, base_seed + 1)
        return cal + test, ["calibration"] * len(cal) + ["test"] * len(test)
    raise GenerationError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
