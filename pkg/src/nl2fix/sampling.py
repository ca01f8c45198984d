"""Candidate generation: provider abstraction, cached sampling, extraction.

Providers come in three request shapes (completion / edit / chat). Raw
responses are persisted to a content-addressed cache before candidates are
returned, so reruns replay byte-identically with zero provider calls.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import re
import tempfile
import threading
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .metrics import canonical_form
from .prompts import PromptSpec, Strategy


class ProviderError(Exception):
    """Transient provider failure; eligible for retry."""


class ProviderExhausted(Exception):
    pass


class BudgetExceeded(Exception):
    pass


class MockScriptError(Exception):
    """The mock script has no row for a requested key; a fixture bug, not a
    transient failure, so it is never retried."""


class GenMode(str, Enum):
    COMPLETION = "completion"
    EDIT = "edit"
    CHAT = "chat"


@dataclass(frozen=True)
class GenParams:
    temperature: float = 0.8
    n_samples: int = 100
    max_gen_tokens: int = 750
    context_budget: int = 4096
    mode: GenMode = GenMode.CHAT

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature out of [0,2]: {self.temperature}")
        if self.n_samples < 1:
            raise ValueError("n_samples must be positive")
        if self.max_gen_tokens < 1:
            raise ValueError("max_gen_tokens must be positive")
        if self.context_budget < 1:
            raise ValueError("context_budget must be positive")


@dataclass(frozen=True)
class CandidatePatch:
    bug_id: str
    sample_index: int
    raw_response: str
    patch_text: str
    canonical: str
    content_hash: str

    @property
    def is_empty(self) -> bool:
        return not self.patch_text


@dataclass(frozen=True)
class GenerationRequest:
    bug_id: str
    sample_index: int
    stage: int
    mode: GenMode
    temperature: float
    max_tokens: int
    prompt_text: str | None = None
    edit_input: str | None = None
    instruction: str | None = None
    turns: tuple[tuple[str, str], ...] = ()


class GenerationProvider:
    provider_id: str = "provider"

    def generate(self, request: GenerationRequest) -> str:
        raise NotImplementedError


class MockProvider(GenerationProvider):
    """Deterministic provider replaying scripted responses.

    Script rows are keyed by (bug_id, index, stage); repeated rows for one
    key are consumed in order (the final row sticks), and a row with
    "fail": true raises a transient ProviderError when consumed.
    """

    def __init__(self, rows: Iterable[dict], provider_id: str = "mock"):
        self.provider_id = provider_id
        self.calls = 0
        self._lock = threading.Lock()
        self._queues: dict[tuple[str, int, int], deque] = {}
        for row in rows:
            key = (row["bug_id"], int(row["index"]), int(row.get("stage", 1)))
            self._queues.setdefault(key, deque()).append(row)

    @classmethod
    def from_jsonl(cls, path: str | Path, provider_id: str = "mock") -> "MockProvider":
        rows = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    rows.append(json.loads(line))
        return cls(rows, provider_id=provider_id)

    def generate(self, request: GenerationRequest) -> str:
        key = (request.bug_id, request.sample_index, request.stage)
        with self._lock:
            self.calls += 1
            queue = self._queues.get(key)
            if not queue:
                raise MockScriptError(f"mock script has no response for {key}")
            # The final row sticks so replays stay deterministic.
            row = queue.popleft() if len(queue) > 1 else queue[0]
        if row.get("fail"):
            raise ProviderError(f"scripted failure for {key}")
        return row["response"]


class HttpProvider(GenerationProvider):
    """Provider speaking a chat/completions-style JSON protocol."""

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

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.api_key_env:
            key = os.environ.get(self.api_key_env, "")
            if key:
                headers["Authorization"] = f"Bearer {key}"
        return headers

    def _post(self, endpoint: str, payload: dict) -> dict:
        import requests

        try:
            response = requests.post(
                f"{self.base_url}{endpoint}",
                json=payload,
                headers=self._headers(),
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise ProviderError(f"request failed: {exc}") from exc
        if response.status_code != 200:
            raise ProviderError(
                f"HTTP {response.status_code}: {response.text[:200]}"
            )
        try:
            return response.json()
        except ValueError as exc:
            raise ProviderError(f"bad JSON from provider: {exc}") from exc

    def generate(self, request: GenerationRequest) -> str:
        common = {"model": self.model_id, "temperature": request.temperature}
        try:
            if request.mode is GenMode.CHAT:
                body = self._post(
                    "/chat/completions",
                    {
                        **common,
                        "max_tokens": request.max_tokens,
                        "messages": [
                            {"role": role, "content": text}
                            for role, text in request.turns
                        ],
                    },
                )
                return body["choices"][0]["message"]["content"]
            if request.mode is GenMode.EDIT:
                body = self._post(
                    "/edits",
                    {
                        **common,
                        "input": request.edit_input or "",
                        "instruction": request.instruction or "",
                    },
                )
                return body["choices"][0]["text"]
            body = self._post(
                "/completions",
                {
                    **common,
                    "max_tokens": request.max_tokens,
                    "prompt": request.prompt_text or "",
                },
            )
            return body["choices"][0]["text"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"unexpected response shape: {exc}") from exc


@dataclass
class RetryPolicy:
    max_attempts: int = 5
    base_delay: float = 1.0
    factor: float = 2.0
    jitter: float = 0.1
    sleep: Callable[[float], None] = time.sleep

    def delay(self, attempt: int) -> float:
        base = self.base_delay * self.factor**attempt
        return base * (1.0 + self.jitter * random.random())


def call_with_retry(fn: Callable[[], str], policy: RetryPolicy) -> str:
    last: ProviderError | None = None
    for attempt in range(policy.max_attempts):
        try:
            return fn()
        except ProviderError as exc:
            last = exc
            if attempt + 1 < policy.max_attempts:
                policy.sleep(policy.delay(attempt))
    raise ProviderExhausted(f"gave up after {policy.max_attempts} attempts: {last}") from last


class SampleCache:
    """cache/samples/{provider}/{bug}/{prompt_digest}/{temperature}/{index}.json"""

    def __init__(self, root: str | Path):
        self.root = Path(root) / "samples"

    def _path(self, provider_id: str, bug_id: str, digest: str, temperature: float, index: int) -> Path:
        return (
            self.root
            / provider_id
            / bug_id
            / digest
            / f"{temperature:g}"
            / f"{index}.json"
        )

    def get(self, provider_id: str, bug_id: str, digest: str, temperature: float, index: int) -> dict | None:
        path = self._path(provider_id, bug_id, digest, temperature, index)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def put(self, provider_id: str, bug_id: str, digest: str, temperature: float, index: int, payload: dict) -> None:
        path = self._path(provider_id, bug_id, digest, temperature, index)
        atomic_write_json(path, payload)


def atomic_write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False, sort_keys=True)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def prompt_digest(prompt: PromptSpec, params: GenParams) -> str:
    payload = {
        "turns": [[t.role.value, t.text] for t in prompt.turns],
        "suffix": prompt.completion_suffix,
        "mode": params.mode.value,
        "max_gen_tokens": params.max_gen_tokens,
        "strategy": prompt.strategy.value,
    }
    blob = json.dumps(payload, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


_FENCE_RE = re.compile(r"```[^\n]*\n(.*?)(?:\n```|\Z)", re.DOTALL)
_SIGNATURE_LINE_RE = re.compile(
    r"^\s*(?:(?:public|private|protected|static|final|synchronized|abstract|"
    r"native|strictfp|default)\s+)*[\w$<>\[\],.\s]*[\w$\]>]\s+[\w$]+\s*\([^;{}]*\)"
    r"\s*(?:throws\s+[\w$.,\s]+)?\{\s*$"
)


def extract_patch(raw: str, mode: GenMode) -> str:
    """Pull function text out of a raw response: first fenced block if any,
    else (chat mode) from a signature-looking line onward, else the trimmed
    response."""
    match = _FENCE_RE.search(raw)
    if match:
        return match.group(1)
    if mode is GenMode.CHAT:
        offset = 0
        for line in raw.splitlines(keepends=True):
            if _SIGNATURE_LINE_RE.match(line.rstrip("\n")):
                return raw[offset:]
            offset += len(line)
    return raw.strip()


def _build_candidate(
    bug_id: str, index: int, raw: str, mode: GenMode, suffix: str | None
) -> CandidatePatch:
    patch = extract_patch(raw, mode)
    if mode is GenMode.COMPLETION and suffix:
        patch = suffix + patch
    canon = canonical_form(patch)
    digest = hashlib.sha256(canon.encode("utf-8")).hexdigest()
    return CandidatePatch(
        bug_id=bug_id,
        sample_index=index,
        raw_response=raw,
        patch_text=patch,
        canonical=canon,
        content_hash=digest,
    )


def _single_request(prompt: PromptSpec, params: GenParams, index: int) -> GenerationRequest:
    turn = prompt.turns[0]
    base = {
        "bug_id": prompt.bug_id,
        "sample_index": index,
        "stage": 1,
        "mode": params.mode,
        "temperature": params.temperature,
        "max_tokens": params.max_gen_tokens,
    }
    if params.mode is GenMode.COMPLETION:
        return GenerationRequest(
            **base, prompt_text=turn.text + (prompt.completion_suffix or "")
        )
    if params.mode is GenMode.EDIT:
        code = "".join(f.content for f in turn.fragments if f.kind == "target_buggy")
        instruction = "".join(
            f.render() for f in turn.fragments if f.kind != "target_buggy"
        )
        return GenerationRequest(**base, edit_input=code, instruction=instruction)
    return GenerationRequest(**base, turns=(("user", turn.text),))


def run_reasoning_dialogue(
    provider: GenerationProvider,
    stages: PromptSpec,
    params: GenParams,
    sample_index: int,
    cache: SampleCache,
    retry: RetryPolicy | None = None,
) -> CandidatePatch:
    """Drive the localize/explain/fix dialogue for one sample index.

    Each stage carries the full conversation so far; only the final reply is
    mined for a patch, but the whole transcript is persisted.
    """
    if len(stages.turns) != 3:
        raise ValueError("reasoning prompt must have exactly 3 staged turns")
    retry = retry or RetryPolicy()
    digest = prompt_digest(stages, params)
    cached = cache.get(provider.provider_id, stages.bug_id, digest, params.temperature, sample_index)
    if cached is not None:
        return _build_candidate(
            stages.bug_id, sample_index, cached["raw_response"], GenMode.CHAT, None
        )
    transcript: list[dict] = []
    reply = ""
    for stage_no, turn in enumerate(stages.turns, start=1):
        transcript.append({"role": "user", "text": turn.text})
        request = GenerationRequest(
            bug_id=stages.bug_id,
            sample_index=sample_index,
            stage=stage_no,
            mode=GenMode.CHAT,
            temperature=params.temperature,
            max_tokens=params.max_gen_tokens,
            turns=tuple((t["role"], t["text"]) for t in transcript),
        )
        reply = call_with_retry(lambda: provider.generate(request), retry)
        transcript.append({"role": "assistant", "text": reply})
    cache.put(
        provider.provider_id,
        stages.bug_id,
        digest,
        params.temperature,
        sample_index,
        {"raw_response": reply, "transcript": transcript, "timestamps": {"created": _now()}},
    )
    return _build_candidate(stages.bug_id, sample_index, reply, GenMode.CHAT, None)


def sample(
    provider: GenerationProvider,
    prompt: PromptSpec,
    params: GenParams,
    cache: SampleCache,
    concurrency: int = 4,
    retry: RetryPolicy | None = None,
) -> list[CandidatePatch]:
    """Draw exactly n_samples candidates for one prompt, cache-first."""
    reserve = params.max_gen_tokens
    if prompt.token_estimate > params.context_budget - reserve:
        raise BudgetExceeded(
            f"{prompt.bug_id}: prompt needs ~{prompt.token_estimate} tokens but "
            f"budget leaves {params.context_budget - reserve}"
        )
    retry = retry or RetryPolicy()
    digest = prompt_digest(prompt, params)
    indices = range(params.n_samples)

    if prompt.strategy is Strategy.REASONING:
        def one_reasoning(index: int) -> CandidatePatch:
            return run_reasoning_dialogue(provider, prompt, params, index, cache, retry)

        return _ordered_map(one_reasoning, indices, concurrency)

    suffix = prompt.completion_suffix

    def one(index: int) -> CandidatePatch:
        cached = cache.get(provider.provider_id, prompt.bug_id, digest, params.temperature, index)
        if cached is None:
            request = _single_request(prompt, params, index)
            raw = call_with_retry(lambda: provider.generate(request), retry)
            cache.put(
                provider.provider_id,
                prompt.bug_id,
                digest,
                params.temperature,
                index,
                {"raw_response": raw, "timestamps": {"created": _now()}},
            )
        else:
            raw = cached["raw_response"]
        return _build_candidate(prompt.bug_id, index, raw, params.mode, suffix)

    return _ordered_map(one, indices, concurrency)


def _ordered_map(fn, indices, concurrency: int) -> list:
    items = list(indices)
    if concurrency <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=concurrency) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class DedupStats:
    unique_count: int
    duplicate_fraction: float
    groups: dict = field(default_factory=dict)  # content_hash -> sample indices


def dedup_stats(candidates: Sequence[CandidatePatch]) -> DedupStats:
    """Duplicate accounting by canonical content hash. Candidates are never
    removed; pass@k still counts all n."""
    groups: dict[str, list[int]] = {}
    for cand in candidates:
        groups.setdefault(cand.content_hash, []).append(cand.sample_index)
    unique = len(groups)
    total = len(candidates)
    fraction = 0.0 if total == 0 else 1.0 - unique / total
    return DedupStats(unique_count=unique, duplicate_fraction=fraction, groups=groups)
