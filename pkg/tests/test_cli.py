import csv
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from nl2fix.cli import (
    ConfigError,
    UnknownBugId,
    cmd_generate,
    cmd_rank,
    cmd_report,
    cmd_validate,
    load_config,
    main,
)
from nl2fix.ranking import LocalEmbeddingProvider
from nl2fix.sampling import GenMode, GenerationRequest, HttpProvider, ProviderError
from tests.conftest import write_fixture_config


def run_ok(args):
    assert main(args) == 0


class TestConfig:
    def test_missing_file(self):
        with pytest.raises(ConfigError):
            load_config("/nonexistent/config.json")

    def test_bad_json(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_missing_corpus(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"corpus_path": "missing.jsonl"}))
        with pytest.raises(ConfigError):
            load_config(path)

    def test_relative_paths_resolve_against_config_dir(self, synthetic_config):
        config = load_config(synthetic_config)
        assert Path(config.corpus_path).is_absolute()
        assert Path(config.corpus_path).exists()

    def test_unknown_strategy(self, tmp_path, synthetic_config):
        raw = json.loads(synthetic_config.read_text())
        raw["strategy"] = "four-shot"
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(raw))
        with pytest.raises(ConfigError):
            load_config(bad)

    def test_threshold_parsing(self, tmp_path, synthetic_config):
        raw = json.loads(synthetic_config.read_text())
        raw["ranking"] = {"threshold": "median"}
        path = tmp_path / "median.json"
        path.write_text(json.dumps(raw))
        assert load_config(path).ranking.threshold == "median"
        raw["ranking"] = {"threshold": "huh"}
        path.write_text(json.dumps(raw))
        with pytest.raises(ConfigError):
            load_config(path)

    def test_cli_exit_code_on_config_error(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"corpus_path": "missing.jsonl"}))
        assert main(["generate", "--config", str(path)]) == 2


class TestGenerate:
    def test_manifest_contents(self, synthetic_config):
        config = load_config(synthetic_config)
        manifest = cmd_generate(config)
        assert len(manifest["entries"]) == 20  # 5 bugs x 4 samples
        assert manifest["provider_id"] == "mock-model"
        bugs = {e["bug_id"] for e in manifest["entries"]}
        assert bugs == {"B-1", "B-2", "B-3", "B-4", "B-5"}

    def test_rerun_identical_and_warm(self, synthetic_config, tmp_path):
        config = load_config(synthetic_config)
        first = cmd_generate(config)
        manifest_path = Path(config.cache_dir) / "manifest.json"
        before = manifest_path.read_bytes()
        second = cmd_generate(config)
        assert first == second
        assert manifest_path.read_bytes() == before

    def test_bug_filter(self, synthetic_config):
        config = load_config(synthetic_config)
        config.bug_filter = ["B-2"]
        manifest = cmd_generate(config)
        assert {e["bug_id"] for e in manifest["entries"]} == {"B-2"}

    def test_unknown_bug_filter(self, synthetic_config):
        config = load_config(synthetic_config)
        config.bug_filter = ["B-99"]
        with pytest.raises(UnknownBugId):
            cmd_generate(config)

    def test_unknown_bug_exit_code(self, synthetic_config):
        assert main(["generate", "--config", str(synthetic_config),
                     "--bugs", "B-99"]) == 2


class TestValidate:
    def test_requires_manifest(self, synthetic_config):
        config = load_config(synthetic_config)
        with pytest.raises(ConfigError):
            cmd_validate(config)
        assert main(["validate", "--config", str(synthetic_config)]) == 2

    def test_truth_table_counts(self, synthetic_config):
        config = load_config(synthetic_config)
        cmd_generate(config)
        results = cmd_validate(config)
        by_bug = {row["bug_id"]: row for row in results["bugs"]}
        assert by_bug["B-1"] == {"bug_id": "B-1", "project": "Lang", "n": 4, "c": 2,
                                 "compile_count": 3, "unique_count": 3, "em_count": 0}
        assert by_bug["B-2"]["c"] == 1
        assert by_bug["B-3"]["c"] == 0
        assert by_bug["B-4"] == {"bug_id": "B-4", "project": "Chart", "n": 4, "c": 4,
                                 "compile_count": 4, "unique_count": 2, "em_count": 0}
        assert by_bug["B-5"]["em_count"] == 1

    def test_duplicates_validated_once(self, synthetic_config):
        config = load_config(synthetic_config)
        cmd_generate(config)
        cmd_validate(config)
        outcome_files = list(Path(config.cache_dir).glob("outcomes/*/*.json"))
        # one outcome per unique patch: 3 + 4 + 3 + 2 + 4
        assert len(outcome_files) == 16

    def test_warm_rerun_no_new_outcomes(self, synthetic_config):
        config = load_config(synthetic_config)
        cmd_generate(config)
        cmd_validate(config)
        stamps = {
            p: p.stat().st_mtime_ns
            for p in Path(config.cache_dir).glob("outcomes/*/*.json")
        }
        cmd_validate(config)
        after = {
            p: p.stat().st_mtime_ns
            for p in Path(config.cache_dir).glob("outcomes/*/*.json")
        }
        assert stamps == after


class TestReport:
    @pytest.fixture
    def reported(self, synthetic_config):
        config = load_config(synthetic_config)
        cmd_generate(config)
        cmd_validate(config)
        cmd_report(config)
        return config

    def test_report_files_exist(self, reported):
        names = {p.name for p in Path(reported.report_dir).iterdir()}
        assert {"passk.csv", "passk.png", "summary.json", "per_project.csv",
                "similarity.json", "similarity.png"} <= names
        assert "overlap.json" not in names  # single model: section omitted

    def test_passk_capped_with_warning(self, reported):
        with open(Path(reported.report_dir) / "passk.csv") as fh:
            rows = list(csv.DictReader(fh))
        by_k = {int(r["k"]): r for r in rows}
        assert by_k[1]["capped"] == "false"
        assert by_k[100]["capped"] == "true"
        assert by_k[100]["k_effective"] == "4"
        assert by_k[100]["pass_at_k"] == by_k[5]["pass_at_k"]
        summary = json.loads((Path(reported.report_dir) / "summary.json").read_text())
        assert any("capped" in w for w in summary["warnings"])

    def test_summary_statistics(self, reported):
        summary = json.loads((Path(reported.report_dir) / "summary.json").read_text())
        assert summary["bugs"] == 5
        assert summary["fixed_bugs"] == 4
        assert summary["plausible_patches"] == 8
        assert summary["em_patches"] == 1
        assert summary["duplicate_pct"] == pytest.approx(20.0)
        assert summary["compile_pct"] == pytest.approx(80.0)
        assert summary["plausible_pct"] == pytest.approx(40.0)
        assert summary["pass_at_k"]["1"] == pytest.approx(0.4)

    def test_per_project_table(self, reported):
        with open(Path(reported.report_dir) / "per_project.csv") as fh:
            rows = {r["project"]: r for r in csv.DictReader(fh)}
        assert rows["Chart"]["bugs"] == "2"
        assert rows["Chart"]["fixed_bugs"] == "1"
        assert rows["Lang"]["plausible_patches"] == "3"
        assert rows["Math"]["em_patches"] == "1"

    def test_similarity_medians_favor_plausible(self, reported):
        payload = json.loads((Path(reported.report_dir) / "similarity.json").read_text())
        plaus = payload["to_buggy"]["plausible"]
        wrong = payload["to_buggy"]["non_plausible"]
        assert plaus["median"] > wrong["median"]

    def test_overlap_with_compare_runs(self, reported, tmp_path):
        other = {
            "model": "other-model",
            "bugs": [
                {"bug_id": "B-1", "project": "Lang", "n": 4, "c": 1,
                 "compile_count": 4, "unique_count": 4, "em_count": 0},
                {"bug_id": "B-9", "project": "Lang", "n": 4, "c": 1,
                 "compile_count": 4, "unique_count": 4, "em_count": 0},
            ],
        }
        other_path = tmp_path / "other_results.json"
        other_path.write_text(json.dumps(other))
        cmd_report(reported, compare=[str(other_path)])
        overlap = json.loads((Path(reported.report_dir) / "overlap.json").read_text())
        regions = overlap["regions"]
        assert regions["mock-model&other-model"] == 1  # B-1 fixed by both
        assert overlap["union"] == 5
        assert overlap["per_model"]["mock-model"] == 4
        assert overlap["per_model"]["other-model"] == 2


class TestRank:
    def test_requires_results(self, synthetic_config):
        config = load_config(synthetic_config)
        with pytest.raises(ConfigError):
            cmd_rank(config)

    def test_rank_outputs(self, ranking_config):
        config = load_config(ranking_config)
        cmd_generate(config)
        cmd_validate(config)
        table = cmd_rank(config)
        by_key = {(r["variant"], r["k"]): r for r in table}
        assert by_key[("all", 1)]["r_pass"] == 100.0
        assert by_key[("compile-pruned", 5)]["pass"] >= by_key[("all", 5)]["pass"]
        suggestions = json.loads(
            (Path(config.report_dir) / "suggestions.json").read_text()
        )
        assert suggestions["threshold"] == 0.95
        one_bug = suggestions["variants"]["all"]["R-01"]
        assert len(one_bug["entries"]) == 1  # only the plausible patch survives
        assert one_bug["entries"][0]["rank"] == 1

    def test_threshold_above_everything(self, ranking_config):
        config = load_config(ranking_config)
        cmd_generate(config)
        cmd_validate(config)
        config.ranking.threshold = 1.01
        table = cmd_rank(config)
        assert all(row["r_pass"] == 0.0 for row in table)

    def test_median_threshold_mode(self, ranking_config):
        config = load_config(ranking_config)
        cmd_generate(config)
        cmd_validate(config)
        config.ranking.threshold = "median"
        table = cmd_rank(config)
        suggestions = json.loads(
            (Path(config.report_dir) / "suggestions.json").read_text()
        )
        assert 0.0 < suggestions["threshold"] < 1.0
        assert table  # still produces the metric table

    def test_single_variant_flag(self, ranking_config):
        config = load_config(ranking_config)
        cmd_generate(config)
        cmd_validate(config)
        table = cmd_rank(config, variant_override="all")
        assert {row["variant"] for row in table} == {"all"}


class TestEndToEnd:
    def test_run_command_byte_identical_reports(self, tmp_path):
        blobs = {}
        for attempt in ("one", "two"):
            workdir = tmp_path / attempt
            workdir.mkdir()
            config_path = write_fixture_config(workdir, "synthetic")
            run_ok(["run", "--config", str(config_path)])
            for name in ("passk.csv", "summary.json", "ranking.csv",
                         "per_project.csv", "similarity.json", "suggestions.json"):
                blobs.setdefault(name, []).append(
                    (workdir / "reports" / name).read_bytes()
                )
        for name, pair in blobs.items():
            assert pair[0] == pair[1], f"{name} differs between runs"

    def test_resume_after_partial_cache_loss(self, synthetic_config):
        config = load_config(synthetic_config)
        cmd_generate(config)
        sample_files = sorted(Path(config.cache_dir).glob("samples/**/*.json"))
        sample_files[0].unlink()
        manifest = cmd_generate(config)  # refills just the missing entry
        assert len(manifest["entries"]) == 20

    def test_jobs_flag_accepted(self, synthetic_config):
        run_ok(["run", "--config", str(synthetic_config), "--jobs", "1"])


class _StubHandler(BaseHTTPRequestHandler):
    def do_POST(self):
        length = int(self.headers["Content-Length"])
        body = json.loads(self.rfile.read(length))
        if self.path == "/chat/completions":
            reply = {"choices": [{"message": {"content": f"echo:{body['messages'][-1]['content']}"}}]}
        elif self.path == "/completions":
            reply = {"choices": [{"text": f"completion:{body['prompt'][:10]}"}]}
        elif self.path == "/edits":
            reply = {"choices": [{"text": f"edited:{body['instruction'][:6]}"}]}
        elif self.path == "/embeddings":
            reply = {"data": [{"embedding": [1.0, 2.0, 2.0]}]}
        else:
            self.send_response(404)
            self.end_headers()
            return
        payload = json.dumps(reply).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture
def http_stub():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


class TestHttpProviders:
    def request(self, mode, **kwargs):
        return GenerationRequest(
            bug_id="B-1", sample_index=0, stage=1, mode=mode,
            temperature=0.8, max_tokens=100, **kwargs,
        )

    def test_chat_protocol(self, http_stub):
        provider = HttpProvider(http_stub, "test-model")
        reply = provider.generate(self.request(GenMode.CHAT, turns=(("user", "hi"),)))
        assert reply == "echo:hi"

    def test_completion_protocol(self, http_stub):
        provider = HttpProvider(http_stub, "test-model")
        reply = provider.generate(self.request(GenMode.COMPLETION, prompt_text="prompt text"))
        assert reply.startswith("completion:")

    def test_edit_protocol(self, http_stub):
        provider = HttpProvider(http_stub, "test-model")
        reply = provider.generate(
            self.request(GenMode.EDIT, edit_input="code", instruction="fix it")
        )
        assert reply == "edited:fix it"

    def test_http_error_is_transient(self, http_stub):
        provider = HttpProvider(http_stub + "/missing", "test-model")
        with pytest.raises(ProviderError):
            provider.generate(self.request(GenMode.CHAT, turns=(("user", "x"),)))

    def test_embedding_protocol(self, http_stub):
        from nl2fix.ranking import HttpEmbeddingProvider

        provider = HttpEmbeddingProvider(http_stub, "embed-model")
        assert provider.embed_text("int x;") == [1.0, 2.0, 2.0]

    def test_local_embedder_plugs_into_same_interface(self):
        provider = LocalEmbeddingProvider(dimension=32)
        assert len(provider.embed_text("int x;")) == 32
