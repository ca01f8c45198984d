"""Deterministic patch recommender.

Embeds the buggy function and every unique candidate, prunes candidates
whose cosine similarity to the buggy code falls below a threshold, then
ranks survivors from lowest to highest similarity: near-identical patches
land last, heavy rewrites are pruned outright.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .codesim import tokenize
from .metrics import EmptyInput, quantile
from .sampling import ProviderError, atomic_write_json


class RankingError(Exception):
    pass


class DimensionMismatch(RankingError):
    pass


class ZeroVector(RankingError):
    pass


class MissingOutcome(RankingError):
    def __init__(self, content_hash: str):
        self.content_hash = content_hash
        super().__init__(f"no outcome recorded for patch {content_hash}")


class EmbeddingProvider:
    provider_id: str = "embedding"

    def embed_text(self, text: str) -> list[float]:
        raise NotImplementedError


class LocalEmbeddingProvider(EmbeddingProvider):
    """Offline deterministic embedder: unit-normalized hashed bag of tokens."""

    def __init__(self, dimension: int = 512):
        self.dimension = dimension
        self.provider_id = f"local-{dimension}"

    def embed_text(self, text: str) -> list[float]:
        tokens = tokenize(text, "java")
        if not tokens:
            raise ValueError("cannot embed text with no tokens")
        counts = np.zeros(self.dimension)
        for token in tokens:
            bucket = int.from_bytes(
                hashlib.sha256(token.encode("utf-8")).digest()[:8], "big"
            ) % self.dimension
            counts[bucket] += 1.0
        norm = float(np.linalg.norm(counts))
        return (counts / norm).tolist()


class HttpEmbeddingProvider(EmbeddingProvider):
    """Embeddings endpoint speaking the usual {model, input} JSON shape."""

    def __init__(
        self,
        base_url: str,
        model_id: str,
        api_key_env: str | None = None,
        timeout: float = 120.0,
    ):
        self.base_url = base_url.rstrip("/")
        self.model_id = model_id
        self.provider_id = model_id
        self.api_key_env = api_key_env
        self.timeout = timeout

    def embed_text(self, text: str) -> list[float]:
        import requests

        headers = {"Content-Type": "application/json"}
        if self.api_key_env:
            key = os.environ.get(self.api_key_env, "")
            if key:
                headers["Authorization"] = f"Bearer {key}"
        try:
            response = requests.post(
                f"{self.base_url}/embeddings",
                json={"model": self.model_id, "input": text},
                headers=headers,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise ProviderError(f"embedding request failed: {exc}") from exc
        if response.status_code != 200:
            raise ProviderError(f"HTTP {response.status_code}: {response.text[:200]}")
        try:
            return list(response.json()["data"][0]["embedding"])
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"unexpected embedding response: {exc}") from exc


class EmbeddingCache:
    """cache/embeddings/{provider_id}/{text_digest}.json"""

    def __init__(self, root: str | Path):
        self.root = Path(root) / "embeddings"

    def _path(self, provider_id: str, digest: str) -> Path:
        return self.root / provider_id / f"{digest}.json"

    def get(self, provider_id: str, digest: str) -> list[float] | None:
        path = self._path(provider_id, digest)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))["vector"]

    def put(self, provider_id: str, digest: str, vector: list[float]) -> None:
        atomic_write_json(self._path(provider_id, digest), {"vector": vector})


def embed(
    provider: EmbeddingProvider, text: str, cache: EmbeddingCache | None = None
) -> list[float]:
    """Embed nonempty text, reusing the cache keyed by text digest."""
    if not text:
        raise ValueError("cannot embed empty text")
    if cache is None:
        return provider.embed_text(text)
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    cached = cache.get(provider.provider_id, digest)
    if cached is not None:
        return cached
    vector = provider.embed_text(text)
    cache.put(provider.provider_id, digest, vector)
    return vector


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    if len(u) != len(v):
        raise DimensionMismatch(f"vector lengths differ: {len(u)} vs {len(v)}")
    if len(u) == 0:
        raise DimensionMismatch("vectors must have at least one component")
    a = np.asarray(u, dtype=float)
    b = np.asarray(v, dtype=float)
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVector("cosine undefined for all-zero vectors")
    return float(np.dot(a, b) / (norm_a * norm_b))


VARIANT_ALL = "all"
VARIANT_COMPILE_PRUNED = "compile-pruned"


@dataclass(frozen=True)
class RankEntry:
    content_hash: str
    similarity: float
    rank: int


@dataclass(frozen=True)
class RankedSuggestions:
    bug_id: str
    entries: tuple[RankEntry, ...]
    pruned: dict  # content_hash -> similarity
    threshold_used: float
    variant: str

    def to_dict(self) -> dict:
        return {
            "bug_id": self.bug_id,
            "entries": [
                {"content_hash": e.content_hash, "similarity": e.similarity, "rank": e.rank}
                for e in self.entries
            ],
            "pruned": dict(sorted(self.pruned.items())),
            "threshold_used": self.threshold_used,
            "variant": self.variant,
        }


def prune_and_rank(
    bug_id: str,
    similarities: Mapping[str, float],
    threshold: float,
    variant: str = VARIANT_ALL,
) -> RankedSuggestions:
    """Keep patches with similarity >= threshold, sorted ascending; equal
    similarities order by content hash so runs are reproducible."""
    survivors = sorted(
        ((h, s) for h, s in similarities.items() if s >= threshold),
        key=lambda pair: (pair[1], pair[0]),
    )
    entries = tuple(
        RankEntry(content_hash=h, similarity=s, rank=i)
        for i, (h, s) in enumerate(survivors, start=1)
    )
    pruned = {h: s for h, s in similarities.items() if s < threshold}
    return RankedSuggestions(
        bug_id=bug_id,
        entries=entries,
        pruned=pruned,
        threshold_used=threshold,
        variant=variant,
    )


def compute_threshold(similarities: Sequence[float]) -> float:
    """Interpolated median of every similarity score in the run."""
    if not similarities:
        raise EmptyInput("no similarity scores")
    return quantile(similarities, 0.5)


def rank_variants(
    bug_id: str,
    similarities: Mapping[str, float],
    compile_status: Mapping[str, str],
    threshold: float,
) -> dict:
    """Both ranking variants: everything, and compile-passing patches only."""
    for content_hash in similarities:
        if content_hash not in compile_status:
            raise MissingOutcome(content_hash)
    compiled = {
        h: s for h, s in similarities.items() if compile_status[h] == "pass"
    }
    return {
        VARIANT_ALL: prune_and_rank(bug_id, similarities, threshold, VARIANT_ALL),
        VARIANT_COMPILE_PRUNED: prune_and_rank(
            bug_id, compiled, threshold, VARIANT_COMPILE_PRUNED
        ),
    }


def r_pass_hit(
    ranked: RankedSuggestions, outcomes: Mapping[str, str], k: int
) -> int:
    """1 if any of the top min(k, len) suggestions is Plausible, else 0."""
    top = ranked.entries[: max(k, 0)]
    for entry in top:
        status = outcomes.get(entry.content_hash)
        if status is None:
            raise MissingOutcome(entry.content_hash)
        if status == "Plausible":
            return 1
    return 0


def r_pass_at_k(
    ranked_by_bug: Sequence[RankedSuggestions],
    outcomes_by_bug: Mapping[str, Mapping[str, str]],
    k: int,
) -> float:
    """Fraction of bugs (as a percentage) whose top-k contains a plausible
    patch."""
    if not ranked_by_bug:
        raise EmptyInput("no ranked bugs")
    hits = sum(
        r_pass_hit(r, outcomes_by_bug.get(r.bug_id, {}), k) for r in ranked_by_bug
    )
    return 100.0 * hits / len(ranked_by_bug)
