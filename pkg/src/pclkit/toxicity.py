"""Toxicity scoring: external HTTP scorer, offline fallback, bucketing, stats.

The external client throttles to a configured request rate, retries
transient failures with bounded exponential backoff, and serves repeated
texts from a persistent content-hash cache.  The fallback scorer is a
deterministic lexicon heuristic so the whole pipeline can run with no
network; it is a stand-in, not a substitute for the real service.
"""

from __future__ import annotations

import enum
import hashlib
import json
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import httpx
import numpy as np

from .lexicon import Lexicon, match_terms
from .model import Intensity, ValidationError

FALLBACK_DIVISOR = 5.0


class ScoreOrigin(str, enum.Enum):
    EXTERNAL = "EXTERNAL"
    FALLBACK = "FALLBACK"
    CACHE = "CACHE"


@dataclass(frozen=True)
class ToxicityScore:
    doc_id: str
    score: float
    origin: ScoreOrigin

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValidationError(
                f"score {self.score} for {self.doc_id!r} outside [0,1]"
            )


@dataclass
class EndpointConfig:
    url: str
    credential: str = ""
    rate_per_sec: float = 1.0
    score_field: str = "score"  # dot path into the JSON response
    max_attempts: int = 3
    max_workers: int = 4
    timeout: float = 10.0


class RateLimiter:
    """Enforces a minimum interval between calls across threads."""

    def __init__(self, rate_per_sec: float):
        self._interval = 1.0 / rate_per_sec if rate_per_sec > 0 else 0.0
        self._lock = threading.Lock()
        self._next_at = 0.0

    def acquire(self):
        with self._lock:
            now = time.monotonic()
            wait = self._next_at - now
            self._next_at = max(now, self._next_at) + self._interval
        if wait > 0:
            time.sleep(wait)


def text_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class ScoreCache:
    """Line-oriented persistent cache: ``sha256-hash<TAB>score`` per line.

    Concurrent readers are fine; writes are serialized and appended.
    """

    def __init__(self, path=None):
        self._path = Path(path) if path else None
        self._lock = threading.Lock()
        self._scores: dict = {}
        if self._path and self._path.exists():
            for line in self._path.read_text(encoding="utf-8").splitlines():
                if line:
                    h, s = line.split("\t")
                    self._scores[h] = float(s)

    def get(self, text: str) -> Optional[float]:
        return self._scores.get(text_hash(text))

    def put(self, text: str, score: float):
        h = text_hash(text)
        with self._lock:
            if h in self._scores:
                return
            self._scores[h] = score
            if self._path:
                with self._path.open("a", encoding="utf-8") as fh:
                    fh.write(f"{h}\t{score}\n")

    def __len__(self):
        return len(self._scores)


class ScoringError(RuntimeError):
    pass


def _extract_score(payload, dotted_path: str, text: str) -> float:
    node = payload
    for part in dotted_path.split("."):
        if not isinstance(node, dict) or part not in node:
            raise ScoringError(
                f"malformed response for text {text[:40]!r}: no field {dotted_path!r}"
            )
        node = node[part]
    try:
        score = float(node)
    except (TypeError, ValueError):
        raise ScoringError(f"malformed response for text {text[:40]!r}: non-numeric score")
    if not 0.0 <= score <= 1.0:
        raise ScoringError(f"malformed response for text {text[:40]!r}: score {score} outside [0,1]")
    return score


def score_external(
    items: Sequence[tuple],
    config: EndpointConfig,
    cache: Optional[ScoreCache] = None,
) -> tuple:
    """Score (doc_id, text) pairs via the configured HTTP endpoint.

    Returns (scores, errors) where errors maps doc_id -> message for
    texts whose retries were exhausted; the batch always completes.
    Output preserves input order.
    """
    cache = cache if cache is not None else ScoreCache()
    limiter = RateLimiter(config.rate_per_sec)
    headers = {}
    if config.credential:
        headers["Authorization"] = f"Bearer {config.credential}"
    client = httpx.Client(timeout=config.timeout, headers=headers)
    errors: dict = {}
    lock = threading.Lock()

    def one(item):
        doc_id, text = item
        cached = cache.get(text)
        if cached is not None:
            return ToxicityScore(doc_id, cached, ScoreOrigin.CACHE)
        last_error = None
        for attempt in range(config.max_attempts):
            limiter.acquire()
            try:
                resp = client.post(config.url, json={"text": text})
                if resp.status_code >= 500:
                    raise ScoringError(f"server error {resp.status_code}")
                resp.raise_for_status()
                score = _extract_score(resp.json(), config.score_field, text)
                cache.put(text, score)
                return ToxicityScore(doc_id, score, ScoreOrigin.EXTERNAL)
            except (httpx.HTTPError, ScoringError, json.JSONDecodeError) as exc:
                last_error = exc
                if attempt + 1 < config.max_attempts:
                    time.sleep(min(2.0, 0.05 * 2**attempt))
        with lock:
            errors[doc_id] = str(last_error)
        return None

    with ThreadPoolExecutor(max_workers=config.max_workers) as pool:
        results = list(pool.map(one, items))
    client.close()
    return [r for r in results if r is not None], errors


def score_fallback(doc_id: str, text: str, lexicon: Lexicon) -> ToxicityScore:
    """Deterministic offline score: summed confidence of matched relevant terms,
    scaled by a fixed divisor and clamped to 1."""
    total = sum(lexicon.confidence_of(m.term) for m in match_terms(text, lexicon))
    return ToxicityScore(doc_id, min(1.0, total / FALLBACK_DIVISOR), ScoreOrigin.FALLBACK)


def bucketize(score: float) -> Intensity:
    """Map a [0,1] toxicity score to MILD / MODERATE / SEVERE (equal thirds)."""
    if not 0.0 <= score <= 1.0:
        raise ValidationError(f"score {score} outside [0,1]")
    if score < 1 / 3:
        return Intensity.MILD
    if score < 2 / 3:
        return Intensity.MODERATE
    return Intensity.SEVERE


@dataclass(frozen=True)
class DistributionStats:
    mean: float
    median: float
    q1: float
    q3: float
    histogram: tuple  # 10 equal bins over [0,1]

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "median": self.median,
            "q1": self.q1,
            "q3": self.q3,
            "histogram": list(self.histogram),
        }


def distribution_stats(scores: Sequence[float]) -> DistributionStats:
    if len(scores) == 0:
        raise ValidationError("distribution_stats requires a non-empty score set")
    arr = np.asarray(scores, dtype=float)
    hist, _ = np.histogram(arr, bins=10, range=(0.0, 1.0))
    return DistributionStats(
        mean=float(arr.mean()),
        median=float(np.median(arr)),
        q1=float(np.quantile(arr, 0.25)),
        q3=float(np.quantile(arr, 0.75)),
        histogram=tuple(int(c) for c in hist),
    )
