import json
from pathlib import Path

import pytest

from nl2fix.corpus import BugRecord

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURES = REPO_ROOT / "fixtures"


def make_record(bug_id="B-1", project="Lang", **overrides) -> BugRecord:
    fields = dict(
        bug_id=bug_id,
        project=project,
        issue_title="clamp returns wrong bound",
        issue_description="Upper bound handling is wrong.",
        buggy_function="public int f(int x) {\n    return x + 1;\n}",
        fixed_function="public int f(int x) {\n    return x + 2;\n}",
        file_path="src/Demo.java",
        method_span=(2, 4),
        workspace_setup_cmd="provision",
        compile_cmd="compile",
        regression_cmd="regress",
        trigger_cmd="trigger",
    )
    fields.update(overrides)
    return BugRecord(**fields)


def write_fixture_config(tmp_path: Path, fixture: str, **overrides) -> Path:
    """Materialize a run config in tmp_path pointing at a shipped fixture
    corpus, with caches and reports isolated under tmp_path."""
    fix = FIXTURES / fixture
    config = json.loads((fix / "config.json").read_text(encoding="utf-8"))
    config["corpus_path"] = str(fix / "corpus.jsonl")
    config["cache_dir"] = str(tmp_path / "cache")
    config["report_dir"] = str(tmp_path / "reports")
    config["generation_provider"]["script_path"] = str(fix / "mock_responses.jsonl")
    config["validation"]["script_path"] = str(fix / "runner_script.json")
    config.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config), encoding="utf-8")
    return path


@pytest.fixture
def synthetic_config(tmp_path):
    return write_fixture_config(tmp_path, "synthetic")


@pytest.fixture
def ranking_config(tmp_path):
    return write_fixture_config(tmp_path, "ranking")
