"""Holistic assessment by an external vision-language model.

The rendered heatmap and the quantitative scores go to a chat-completions
style endpoint, which answers TRUE (target present) or FALSE (absent). When
the assessor answers, its answer is final; when it cannot be reached or
replies without a verdict the quantitative decision stands.
"""

from __future__ import annotations

import base64
import json
import logging
import math
import os
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Protocol, Sequence

import httpx

from .config import ConfigError, Thresholds, parse_mask
from .render import HeatmapImage
from .scoring import QualityScores, dimension_passes

logger = logging.getLogger(__name__)

PRESENT, ABSENT, UNAVAILABLE = "target_present", "target_absent", "unavailable"

_VERDICT_RE = re.compile(r"\b(true|false)\b", re.IGNORECASE)


class TransportError(RuntimeError):
    """A single request to the assessor failed (network, auth, timeout, bad payload)."""


@dataclass(frozen=True)
class AssessorConfig:
    endpoint_url: str = "https://api.openai.com/v1/chat/completions"
    model_name: str = "gpt-4o"
    api_key_env: str = "OPENAI_API_KEY"
    timeout: float = 30.0
    max_retries: int = 2
    token_budget: int = 300
    max_in_flight: int = 4

    def __post_init__(self) -> None:
        if not self.timeout > 0:
            raise ConfigError(f"timeout must be positive, got {self.timeout}")
        if self.max_retries < 0:
            raise ConfigError(f"max_retries must be >= 0, got {self.max_retries}")
        if self.token_budget < 1:
            raise ConfigError(f"token_budget must be >= 1, got {self.token_budget}")
        if self.max_in_flight < 1:
            raise ConfigError(f"max_in_flight must be >= 1, got {self.max_in_flight}")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "AssessorConfig":
        if not isinstance(data, dict):
            raise ConfigError("assessor config must be a JSON object")
        unknown = sorted(set(data) - {f.name for f in fields(cls)})
        if unknown:
            raise ConfigError(f"unknown assessor config field(s): {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | Path) -> "AssessorConfig":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except OSError as exc:
            raise ConfigError(f"cannot read assessor config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"assessor config {path} is not valid JSON: {exc}") from exc


@dataclass(frozen=True)
class HolisticVerdict:
    decision: str
    raw_response: str
    latency: float
    attempts: int = 1

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Verdict:
    quantitative_decision: bool
    holistic: HolisticVerdict | None
    final_decision: bool
    rationale: str
    scores: QualityScores
    passes: dict[str, bool] | None = None

    def to_dict(self) -> dict:
        return {
            "scores": self.scores.to_dict(),
            "passes": self.passes,
            "quantitative": self.quantitative_decision,
            "holistic": None if self.holistic is None else self.holistic.to_dict(),
            "final": self.final_decision,
            "rationale": self.rationale,
        }


# -- prompt -----------------------------------------------------------------

_PROMPT_TEMPLATE = """\
You are checking whether a segmentation query names an object that is really in a medical image.
The attached heatmap shows how strongly each image region responds to the query (blue low, red high).

Typical patterns:
- Target present: strong responses form one compact, coherent blob near the target.
- Target absent: high responses are weak, irregularly scattered, or split into several separate patches.

A quantitative scorer measured this map (score / threshold / result):
- Strength: {s:.4f} / {s_thr:.4f} / {s_pass}
- Compactness: {c:.4f} / {c_thr:.4f} / {c_pass}
- Purity: {p:.4f} / {p_thr:.4f} / {p_pass}
Scorer verdict: {verdict}.

If you are confident in your own reading of the heatmap, decide from it. If you are not fully confident, rely heavily on the scorer verdict.
Answer with exactly one word: TRUE if the target is present, FALSE if it is absent."""


def build_prompt(scores: QualityScores, thresholds: Thresholds = Thresholds(), mask=None) -> str:
    passes = dimension_passes(scores, thresholds)
    dims = parse_mask(mask)
    verdict = "TRUE (target present)" if all(passes[d] for d in dims) else "FALSE (target absent)"
    word = {True: "pass", False: "fail"}
    return _PROMPT_TEMPLATE.format(
        s=scores.strength,
        c=scores.compactness,
        p=scores.purity,
        s_thr=thresholds.s_thr,
        c_thr=thresholds.c_thr,
        p_thr=thresholds.p_thr,
        s_pass=word[passes["S"]],
        c_pass=word[passes["C"]],
        p_pass=word[passes["P"]],
        verdict=verdict,
    )


def estimate_tokens(text: str) -> int:
    """Rough token count: one token per four characters, rounded up."""
    return math.ceil(len(text) / 4)


def parse_decision(reply: str) -> str | None:
    """First standalone TRUE/FALSE in ``reply`` (any case), or None."""
    match = _VERDICT_RE.search(reply or "")
    if match is None:
        return None
    return PRESENT if match.group(1).lower() == "true" else ABSENT


# -- transports ---------------------------------------------------------------


class Transport(Protocol):
    def complete(self, request: dict, timeout: float) -> str: ...


def build_request(image: HeatmapImage, prompt: str, config: AssessorConfig) -> dict:
    data_url = "data:image/png;base64," + base64.b64encode(image.png).decode("ascii")
    return {
        "model": config.model_name,
        "max_tokens": config.token_budget,
        "temperature": 0,
        "messages": [
            {
                "role": "user",
                "content": [
                    {"type": "text", "text": prompt},
                    {"type": "image_url", "image_url": {"url": data_url}},
                ],
            }
        ],
    }


class HttpTransport:
    """POSTs chat-completions requests; the API key comes from an environment variable."""

    def __init__(self, config: AssessorConfig, client: httpx.Client | None = None):
        self.config = config
        self._client = client or httpx.Client()

    def complete(self, request: dict, timeout: float) -> str:
        key = os.environ.get(self.config.api_key_env)
        if not key:
            raise TransportError(f"API key variable {self.config.api_key_env} is not set")
        try:
            resp = self._client.post(
                self.config.endpoint_url,
                json=request,
                headers={"Authorization": f"Bearer {key}"},
                timeout=timeout,
            )
        except httpx.HTTPError as exc:
            raise TransportError(f"{type(exc).__name__}: {exc}") from exc
        if resp.status_code != 200:
            raise TransportError(f"HTTP {resp.status_code}: {resp.text[:500]}")
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed reply: {resp.text[:500]}") from exc

    def close(self) -> None:
        self._client.close()


class MockTransport:
    """Replays a scripted transcript, one item per request.

    Items are reply strings, ``{"error": message}`` for a failed request, or
    ``{"delay": seconds, "reply": text}`` for a slow one (a delay beyond the
    request timeout fails as a timeout after waiting out the timeout).
    """

    def __init__(self, transcript: Sequence[Any], cycle: bool = False):
        self.transcript = list(transcript)
        self.cycle = cycle
        self.calls = 0
        self.requests: list[dict] = []
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: str | Path, cycle: bool = False) -> "MockTransport":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load transcript {path}: {exc}") from exc
        if not isinstance(data, list):
            raise ConfigError(f"transcript {path} must be a JSON list")
        return cls(data, cycle=cycle)

    def complete(self, request: dict, timeout: float) -> str:
        with self._lock:
            n = self.calls
            self.calls += 1
            self.requests.append(request)
        if n >= len(self.transcript):
            if not self.cycle or not self.transcript:
                raise TransportError("mock transcript exhausted")
            n %= len(self.transcript)
        item = self.transcript[n]
        if isinstance(item, str):
            return item
        if "error" in item:
            raise TransportError(str(item["error"]))
        delay = float(item.get("delay", 0.0))
        if delay > timeout:
            time.sleep(timeout)
            raise TransportError(f"timed out after {timeout}s")
        time.sleep(delay)
        return str(item.get("reply", ""))


# -- assessment ---------------------------------------------------------------


def assess(image: HeatmapImage, prompt: str, config: AssessorConfig, client: Transport) -> HolisticVerdict:
    """Ask the assessor, retrying failures up to ``config.max_retries`` times."""
    request = build_request(image, prompt, config)
    notes: list[str] = []
    start = time.perf_counter()
    for attempt in range(1, config.max_retries + 2):
        try:
            reply = client.complete(request, config.timeout)
        except TransportError as exc:
            notes.append(f"attempt {attempt}: {exc}")
            logger.warning("assessor attempt %d failed: %s", attempt, exc)
            continue
        decision = parse_decision(reply)
        if decision is not None:
            return HolisticVerdict(decision, reply, time.perf_counter() - start, attempt)
        notes.append(f"attempt {attempt}: no TRUE/FALSE in reply: {reply!r}")
    return HolisticVerdict(UNAVAILABLE, "\n".join(notes), time.perf_counter() - start, config.max_retries + 1)


def assess_many(jobs: Sequence[tuple[HeatmapImage, str]], config: AssessorConfig, client: Transport) -> list[HolisticVerdict]:
    """Assess several (image, prompt) pairs with at most ``max_in_flight`` concurrent requests."""
    with ThreadPoolExecutor(max_workers=config.max_in_flight) as pool:
        return list(pool.map(lambda job: assess(job[0], job[1], config, client), jobs))


def combine(quantitative: bool, holistic: HolisticVerdict | None) -> tuple[bool, str]:
    """Final decision and a rationale naming which path decided."""
    q = "present" if quantitative else "absent"
    if holistic is None:
        return quantitative, f"quantitative decision ({q}); holistic assessor disabled"
    if holistic.decision in (PRESENT, ABSENT):
        final = holistic.decision == PRESENT
        h = "present" if final else "absent"
        kind = "holistic override" if final != quantitative else "holistic decision, agrees with quantitative"
        return final, f"{kind}: assessor judged target {h} (quantitative: {q})"
    return quantitative, f"quantitative fallback ({q}); holistic assessor unavailable"
