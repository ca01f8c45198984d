import hashlib
import json

import pytest

from nl2fix.metrics import canonical_form
from nl2fix.prompts import build_reasoning_turns, build_zero_shot
from nl2fix.sampling import (
    BudgetExceeded,
    GenMode,
    GenParams,
    MockProvider,
    MockScriptError,
    ProviderError,
    ProviderExhausted,
    RetryPolicy,
    SampleCache,
    call_with_retry,
    dedup_stats,
    extract_patch,
    prompt_digest,
    run_reasoning_dialogue,
    sample,
)
from tests.conftest import make_record

NO_SLEEP = RetryPolicy(sleep=lambda _: None)


def mock(rows, **kwargs):
    return MockProvider(rows, **kwargs)


def script_rows(bug_id, responses, stage=1):
    return [
        {"bug_id": bug_id, "index": i, "stage": stage, "response": r}
        for i, r in enumerate(responses)
    ]


class TestGenParams:
    def test_defaults(self):
        params = GenParams()
        assert params.n_samples == 100
        assert params.max_gen_tokens == 750

    def test_validation(self):
        with pytest.raises(ValueError):
            GenParams(temperature=2.5)
        with pytest.raises(ValueError):
            GenParams(n_samples=0)
        with pytest.raises(ValueError):
            GenParams(max_gen_tokens=0)


class TestExtractPatch:
    def test_first_fence(self):
        raw = "Here is the fix:\n```\nint f(){return 1;}\n```"
        assert extract_patch(raw, GenMode.CHAT) == "int f(){return 1;}"

    def test_first_of_two_fences(self):
        raw = "```java\nfirst();\n```\ntext\n```\nsecond();\n```"
        assert extract_patch(raw, GenMode.CHAT) == "first();"

    def test_plain_code_trimmed(self):
        assert extract_patch("  int x;  ", GenMode.COMPLETION) == "int x;"

    def test_chat_signature_heuristic(self):
        raw = "Sure, here you go.\npublic int f(int x) {\n    return x;\n}"
        assert extract_patch(raw, GenMode.CHAT) == "public int f(int x) {\n    return x;\n}"

    def test_unclosed_fence_reads_to_end(self):
        raw = "```java\nint x;\nint y;"
        assert extract_patch(raw, GenMode.CHAT) == "int x;\nint y;"

    def test_empty_result_allowed(self):
        assert extract_patch("   ", GenMode.CHAT) == ""


class TestMockProviderAndRetry:
    def test_scripted_order(self, tmp_path):
        provider = mock(script_rows("B-1", ["r0", "r1", "r2"]))
        record = make_record()
        prompt = build_zero_shot(record)
        params = GenParams(n_samples=3, context_budget=4096)
        cands = sample(provider, prompt, params, SampleCache(tmp_path), concurrency=1)
        assert [c.raw_response for c in cands] == ["r0", "r1", "r2"]
        assert [c.sample_index for c in cands] == [0, 1, 2]

    def test_fail_twice_then_succeed(self, tmp_path):
        rows = [
            {"bug_id": "B-1", "index": 0, "stage": 1, "fail": True},
            {"bug_id": "B-1", "index": 0, "stage": 1, "fail": True},
            {"bug_id": "B-1", "index": 0, "stage": 1, "response": "ok"},
        ]
        provider = mock(rows)
        prompt = build_zero_shot(make_record())
        params = GenParams(n_samples=1)
        cands = sample(provider, prompt, params, SampleCache(tmp_path),
                       concurrency=1, retry=NO_SLEEP)
        assert cands[0].raw_response == "ok"
        assert provider.calls == 3  # two failures plus the success

    def test_retries_exhausted(self, tmp_path):
        rows = [{"bug_id": "B-1", "index": 0, "stage": 1, "fail": True}]
        provider = mock(rows)
        prompt = build_zero_shot(make_record())
        with pytest.raises(ProviderExhausted):
            sample(provider, prompt, GenParams(n_samples=1), SampleCache(tmp_path),
                   concurrency=1, retry=NO_SLEEP)
        assert provider.calls == 5  # max attempts

    def test_missing_script_entry(self, tmp_path):
        provider = mock(script_rows("B-1", ["only-index-0"]))
        prompt = build_zero_shot(make_record())
        with pytest.raises(MockScriptError):
            sample(provider, prompt, GenParams(n_samples=2), SampleCache(tmp_path),
                   concurrency=1, retry=NO_SLEEP)

    def test_from_jsonl(self, tmp_path):
        path = tmp_path / "script.jsonl"
        path.write_text(
            "\n".join(json.dumps(r) for r in script_rows("B-1", ["a"])) + "\n"
        )
        provider = MockProvider.from_jsonl(path)
        prompt = build_zero_shot(make_record())
        cands = sample(provider, prompt, GenParams(n_samples=1), SampleCache(tmp_path),
                       concurrency=1)
        assert cands[0].raw_response == "a"

    def test_retry_backoff_delays_grow(self):
        sleeps = []
        policy = RetryPolicy(base_delay=1.0, factor=2.0, jitter=0.0,
                             sleep=sleeps.append)
        attempts = iter([ProviderError("x")] * 3 + ["done"])

        def flaky():
            item = next(attempts)
            if isinstance(item, ProviderError):
                raise item
            return item

        assert call_with_retry(flaky, policy) == "done"
        assert sleeps == [1.0, 2.0, 4.0]


class TestCacheBehaviour:
    def test_warm_cache_zero_calls(self, tmp_path):
        cache = SampleCache(tmp_path)
        prompt = build_zero_shot(make_record())
        params = GenParams(n_samples=3)
        first = sample(mock(script_rows("B-1", ["a", "b", "c"])), prompt, params,
                       cache, concurrency=1)
        cold_provider = mock([])  # empty script: any call would fail
        second = sample(cold_provider, prompt, params, cache, concurrency=1)
        assert cold_provider.calls == 0
        assert [c.content_hash for c in first] == [c.content_hash for c in second]
        assert [c.raw_response for c in first] == [c.raw_response for c in second]

    def test_partial_cache_fetches_only_missing(self, tmp_path):
        cache = SampleCache(tmp_path)
        prompt = build_zero_shot(make_record())
        params = GenParams(n_samples=3)
        provider = mock(script_rows("B-1", ["a", "b", "c"]))
        sample(provider, prompt, params, cache, concurrency=1)
        digest = prompt_digest(prompt, params)
        victim = cache._path(provider.provider_id, "B-1", digest, params.temperature, 1)
        victim.unlink()
        refill = mock(script_rows("B-1", ["x", "b2", "z"]))
        cands = sample(refill, prompt, params, cache, concurrency=1)
        assert refill.calls == 1
        assert cands[1].raw_response == "b2"
        assert cands[0].raw_response == "a"

    def test_different_params_use_different_cache_keys(self, tmp_path):
        cache = SampleCache(tmp_path)
        prompt = build_zero_shot(make_record())
        hot = GenParams(n_samples=1, temperature=0.8)
        cold = GenParams(n_samples=1, temperature=0.2)
        sample(mock(script_rows("B-1", ["hot"])), prompt, hot, cache, concurrency=1)
        provider = mock(script_rows("B-1", ["cold"]))
        cands = sample(provider, prompt, cold, cache, concurrency=1)
        assert provider.calls == 1
        assert cands[0].raw_response == "cold"


class TestCandidates:
    def test_canonical_and_hash(self, tmp_path):
        prompt = build_zero_shot(make_record())
        cands = sample(mock(script_rows("B-1", ["int f() { return 1; }"])),
                       prompt, GenParams(n_samples=1), SampleCache(tmp_path),
                       concurrency=1)
        cand = cands[0]
        assert cand.canonical == canonical_form(cand.patch_text)
        assert cand.content_hash == hashlib.sha256(
            cand.canonical.encode()
        ).hexdigest()
        assert not cand.is_empty

    def test_completion_mode_prepends_signature(self, tmp_path):
        record = make_record(
            buggy_function="public int f(int x) {\n    return x + 1;\n}",
            fixed_function="public int f(int x) {\n    return x + 2;\n}",
        )
        prompt = build_zero_shot(record)
        params = GenParams(n_samples=1, mode=GenMode.COMPLETION)
        cands = sample(mock(script_rows("B-1", ["\n    return x + 2;\n}"])),
                       prompt, params, SampleCache(tmp_path), concurrency=1)
        # signature + trimmed continuation, concatenated verbatim
        assert cands[0].patch_text == "public int f(int x) {return x + 2;\n}"
        assert cands[0].canonical == canonical_form(record.fixed_function)

    def test_empty_extraction_flagged(self, tmp_path):
        prompt = build_zero_shot(make_record())
        cands = sample(mock(script_rows("B-1", ["   "])), prompt,
                       GenParams(n_samples=1), SampleCache(tmp_path), concurrency=1)
        assert cands[0].is_empty

    def test_budget_exceeded(self, tmp_path):
        prompt = build_zero_shot(make_record())
        params = GenParams(n_samples=1, context_budget=100, max_gen_tokens=99)
        with pytest.raises(BudgetExceeded):
            sample(mock([]), prompt, params, SampleCache(tmp_path))


class TestReasoningDialogue:
    def rows(self):
        rows = []
        for stage, reply in ((1, "lines 3-4"), (2, "off by one"),
                             (3, "```\nint f() { return 2; }\n```")):
            rows.append({"bug_id": "B-1", "index": 0, "stage": stage, "response": reply})
        return rows

    def test_three_stage_transcript(self, tmp_path):
        cache = SampleCache(tmp_path)
        prompt = build_reasoning_turns(make_record())
        params = GenParams(n_samples=1)
        cand = run_reasoning_dialogue(mock(self.rows()), prompt, params, 0, cache)
        assert cand.patch_text == "int f() { return 2; }"
        digest = prompt_digest(prompt, params)
        payload = cache.get("mock", "B-1", digest, params.temperature, 0)
        assert len(payload["transcript"]) == 6
        roles = [t["role"] for t in payload["transcript"]]
        assert roles == ["user", "assistant"] * 3

    def test_stage_failure_yields_no_candidate(self, tmp_path):
        rows = self.rows()
        rows[1] = {"bug_id": "B-1", "index": 0, "stage": 2, "fail": True}
        prompt = build_reasoning_turns(make_record())
        with pytest.raises(ProviderExhausted):
            run_reasoning_dialogue(mock(rows), prompt, GenParams(n_samples=1), 0,
                                   SampleCache(tmp_path), retry=NO_SLEEP)

    def test_samples_are_independent_dialogues(self, tmp_path):
        rows = []
        for index in (0, 1):
            for stage in (1, 2, 3):
                rows.append({
                    "bug_id": "B-1", "index": index, "stage": stage,
                    "response": f"i{index}s{stage}",
                })
        prompt = build_reasoning_turns(make_record())
        params = GenParams(n_samples=2)
        cache = SampleCache(tmp_path)
        cands = sample(mock(rows), prompt, params, cache, concurrency=1)
        digest = prompt_digest(prompt, params)
        for index in (0, 1):
            transcript = cache.get("mock", "B-1", digest, params.temperature, index)["transcript"]
            replies = [t["text"] for t in transcript if t["role"] == "assistant"]
            assert replies == [f"i{index}s1", f"i{index}s2", f"i{index}s3"]

    def test_warm_cache_replays_dialogue(self, tmp_path):
        cache = SampleCache(tmp_path)
        prompt = build_reasoning_turns(make_record())
        params = GenParams(n_samples=1)
        first = sample(mock(self.rows()), prompt, params, cache, concurrency=1)
        silent = mock([])
        second = sample(silent, prompt, params, cache, concurrency=1)
        assert silent.calls == 0
        assert first[0].content_hash == second[0].content_hash


class TestDedupStats:
    def make(self, texts):
        prompt = build_zero_shot(make_record())
        rows = script_rows("B-1", texts)
        import tempfile
        from pathlib import Path
        with tempfile.TemporaryDirectory() as tmp:
            return sample(mock(rows), prompt, GenParams(n_samples=len(texts)),
                          SampleCache(Path(tmp)), concurrency=1)

    def test_all_identical(self):
        stats = dedup_stats(self.make(["int x;", "int  x;", "int\tx;", "intx;"]))
        assert stats.unique_count == 1
        assert stats.duplicate_fraction == 0.75

    def test_all_distinct(self):
        stats = dedup_stats(self.make(["a;", "b;", "c;"]))
        assert stats.unique_count == 3
        assert stats.duplicate_fraction == 0.0

    def test_two_pairs(self):
        stats = dedup_stats(self.make(["a ;", "b ;", "a;", "b;"]))
        assert stats.unique_count == 2
        assert stats.duplicate_fraction == 0.5
        assert sorted(len(v) for v in stats.groups.values()) == [2, 2]

    def test_empty(self):
        stats = dedup_stats([])
        assert stats.unique_count == 0
        assert stats.duplicate_fraction == 0.0
