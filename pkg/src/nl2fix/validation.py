"""Patch application and sandboxed test-based classification.

Each validation provisions a fresh workspace via the record's setup command,
splices the candidate into the target file, then runs compile, regression
and trigger commands in order. A stage that times out counts as failed.
Outcomes are cached by (bug_id, canonical content hash), so whitespace
variants of one patch validate only once.
"""

from __future__ import annotations

import json
import os
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .corpus import BugRecord
from .sampling import CandidatePatch, atomic_write_json


class ValidationError(Exception):
    pass


class SpanOutOfRange(ValidationError):
    pass


class WorkspaceSetupFailed(ValidationError):
    pass


class RunnerScriptError(Exception):
    """The scripted runner has no entry for a command; a fixture bug."""


class PatchStatus(str, Enum):
    PLAUSIBLE = "Plausible"
    WRONG = "Wrong"
    UNCOMPILABLE = "Uncompilable"


_STAGES = ("compile", "regression", "trigger")
_LOG_LIMIT = 4000


@dataclass(frozen=True)
class CommandResult:
    exit_code: int
    stdout: str
    stderr: str
    seconds: float
    timed_out: bool

    @property
    def ok(self) -> bool:
        return self.exit_code == 0 and not self.timed_out


class CommandRunner:
    def run(self, command: str, cwd: Path, env: dict, timeout: float) -> CommandResult:
        raise NotImplementedError


class SubprocessRunner(CommandRunner):
    """Executes opaque shell command strings in the workspace directory."""

    def run(self, command: str, cwd: Path, env: dict, timeout: float) -> CommandResult:
        start = time.perf_counter()
        try:
            proc = subprocess.run(
                command,
                shell=True,
                cwd=cwd,
                env=env,
                capture_output=True,
                text=True,
                timeout=timeout,
            )
            return CommandResult(
                exit_code=proc.returncode,
                stdout=proc.stdout or "",
                stderr=proc.stderr or "",
                seconds=time.perf_counter() - start,
                timed_out=False,
            )
        except subprocess.TimeoutExpired as exc:
            out = exc.stdout.decode(errors="replace") if isinstance(exc.stdout, bytes) else (exc.stdout or "")
            err = exc.stderr.decode(errors="replace") if isinstance(exc.stderr, bytes) else (exc.stderr or "")
            return CommandResult(
                exit_code=-1,
                stdout=out,
                stderr=err,
                seconds=time.perf_counter() - start,
                timed_out=True,
            )


class ScriptedRunner(CommandRunner):
    """Test stub: command strings map to scripted effects, no toolchain.

    Script entry shape per command string:
      {"exit": 0,                          # default exit code
       "files": {"relative/path": "..."},  # written into cwd before exiting
       "cases": [{"file": "p", "contains": "s", "exit": 1}, ...]}
    Cases are checked in order against the (patched) workspace content, so a
    fake compiler/test can react to what the candidate actually changed.
    """

    def __init__(self, script: dict):
        self.script = dict(script)
        self.calls: list[str] = []

    @classmethod
    def from_json(cls, path: str | Path) -> "ScriptedRunner":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))

    def run(self, command: str, cwd: Path, env: dict, timeout: float) -> CommandResult:
        self.calls.append(command)
        if command not in self.script:
            raise RunnerScriptError(f"runner script has no entry for command {command!r}")
        entry = self.script[command]
        for rel, content in entry.get("files", {}).items():
            target = Path(cwd) / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(content, encoding="utf-8")
        exit_code = int(entry.get("exit", 0))
        for case in entry.get("cases", []):
            probe = Path(cwd) / case["file"]
            if probe.exists() and case["contains"] in probe.read_text(encoding="utf-8"):
                exit_code = int(case["exit"])
                break
        return CommandResult(exit_code, "", "", 0.0, False)


@dataclass(frozen=True)
class ValidationOutcome:
    bug_id: str
    content_hash: str
    status: PatchStatus
    stage_results: dict  # stage -> "pass" | "fail" | "skipped"
    wall_time: dict  # stage -> seconds

    def to_dict(self) -> dict:
        return {
            "bug_id": self.bug_id,
            "content_hash": self.content_hash,
            "status": self.status.value,
            "stage_results": dict(self.stage_results),
            "wall_time": dict(self.wall_time),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "ValidationOutcome":
        return cls(
            bug_id=obj["bug_id"],
            content_hash=obj["content_hash"],
            status=PatchStatus(obj["status"]),
            stage_results=dict(obj["stage_results"]),
            wall_time=dict(obj.get("wall_time", {})),
        )


def classify(stage_results: dict) -> PatchStatus:
    """Total classification: exactly one status fits any completed run."""
    if stage_results["compile"] == "fail":
        return PatchStatus.UNCOMPILABLE
    if all(stage_results[s] == "pass" for s in _STAGES):
        return PatchStatus.PLAUSIBLE
    if any(stage_results[s] == "fail" for s in ("regression", "trigger")):
        return PatchStatus.WRONG
    raise ValueError(f"incomplete stage results: {stage_results!r}")


def apply_patch(file_source: str, span: tuple[int, int], patch_text: str) -> str:
    """Replace the 1-based inclusive line range with the patch text; every
    other line keeps its exact bytes."""
    start, end = span
    lines = file_source.splitlines(keepends=True)
    if not (1 <= start <= end <= len(lines)):
        raise SpanOutOfRange(
            f"span ({start},{end}) does not fit a {len(lines)}-line file"
        )
    prefix = "".join(lines[: start - 1])
    suffix = "".join(lines[end:])
    body = patch_text
    if suffix and not body.endswith("\n"):
        body += "\n"
    return prefix + body + suffix


class Validator:
    def __init__(
        self,
        runner: CommandRunner,
        cache_dir: str | Path,
        stage_timeout_s: float = 600.0,
        workspace_root: str | Path | None = None,
    ):
        self.runner = runner
        self.outcome_dir = Path(cache_dir) / "outcomes"
        self.stage_timeout_s = stage_timeout_s
        self.workspace_root = str(workspace_root) if workspace_root else None

    # -- cache --------------------------------------------------------------

    def _cache_path(self, bug_id: str, content_hash: str) -> Path:
        return self.outcome_dir / bug_id / f"{content_hash}.json"

    def _load_cached(self, bug_id: str, content_hash: str) -> dict | None:
        path = self._cache_path(bug_id, content_hash)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def _store(self, payload: dict) -> None:
        atomic_write_json(
            self._cache_path(payload["bug_id"], payload["content_hash"]), payload
        )

    # -- execution ----------------------------------------------------------

    def _provision(self, record: BugRecord, patch: CandidatePatch) -> tuple[Path, dict]:
        workspace = Path(
            tempfile.mkdtemp(prefix=f"nl2fix-{record.bug_id}-", dir=self.workspace_root)
        )
        env = {**os.environ, "WORKSPACE_DIR": str(workspace)}
        setup = self.runner.run(
            record.workspace_setup_cmd, cwd=workspace, env=env, timeout=self.stage_timeout_s
        )
        if not setup.ok:
            raise WorkspaceSetupFailed(
                f"{record.bug_id}: setup command failed "
                f"(exit {setup.exit_code}): {setup.stderr[:500]}"
            )
        target = workspace / record.file_path
        if not target.exists():
            raise WorkspaceSetupFailed(
                f"{record.bug_id}: {record.file_path} missing after setup"
            )
        patched = apply_patch(
            target.read_text(encoding="utf-8"), record.method_span, patch.patch_text
        )
        target.write_text(patched, encoding="utf-8")
        return workspace, env

    def _run_stages(
        self, record: BugRecord, workspace: Path, env: dict, stop_after: str | None = None
    ) -> tuple[dict, dict, dict]:
        commands = {
            "compile": record.compile_cmd,
            "regression": record.regression_cmd,
            "trigger": record.trigger_cmd,
        }
        results: dict = {}
        walls: dict = {}
        logs: dict = {}
        for stage in _STAGES:
            res = self.runner.run(
                commands[stage], cwd=workspace, env=env, timeout=self.stage_timeout_s
            )
            results[stage] = "pass" if res.ok else "fail"
            walls[stage] = round(res.seconds, 6)
            logs[stage] = {
                "stdout": res.stdout[-_LOG_LIMIT:],
                "stderr": res.stderr[-_LOG_LIMIT:],
                "timed_out": res.timed_out,
            }
            if results[stage] == "fail" or stage == stop_after:
                break
        for stage in _STAGES:
            results.setdefault(stage, "skipped")
            walls.setdefault(stage, 0.0)
        return results, walls, logs

    def validate(self, record: BugRecord, patch: CandidatePatch) -> ValidationOutcome:
        if record.bug_id != patch.bug_id:
            raise ValidationError(
                f"patch {patch.bug_id} does not belong to record {record.bug_id}"
            )
        cached = self._load_cached(record.bug_id, patch.content_hash)
        if cached is not None and not cached.get("partial"):
            return ValidationOutcome.from_dict(cached)
        if cached is not None and cached["stage_results"].get("compile") == "fail":
            results = {"compile": "fail", "regression": "skipped", "trigger": "skipped"}
            outcome = ValidationOutcome(
                bug_id=record.bug_id,
                content_hash=patch.content_hash,
                status=PatchStatus.UNCOMPILABLE,
                stage_results=results,
                wall_time={**{s: 0.0 for s in _STAGES}, **cached.get("wall_time", {})},
            )
            self._store(outcome.to_dict())
            return outcome
        workspace, env = self._provision(record, patch)
        try:
            results, walls, logs = self._run_stages(record, workspace, env)
        finally:
            shutil.rmtree(workspace, ignore_errors=True)
        outcome = ValidationOutcome(
            bug_id=record.bug_id,
            content_hash=patch.content_hash,
            status=classify(results),
            stage_results=results,
            wall_time=walls,
        )
        self._store({**outcome.to_dict(), "log": logs})
        return outcome

    def compile_check(self, record: BugRecord, patch: CandidatePatch) -> str:
        """Run only provision + apply + compile; shares the outcome cache."""
        cached = self._load_cached(record.bug_id, patch.content_hash)
        if cached is not None:
            return cached["stage_results"]["compile"]
        workspace, env = self._provision(record, patch)
        try:
            results, walls, logs = self._run_stages(
                record, workspace, env, stop_after="compile"
            )
        finally:
            shutil.rmtree(workspace, ignore_errors=True)
        self._store(
            {
                "bug_id": record.bug_id,
                "content_hash": patch.content_hash,
                "partial": True,
                "stage_results": {"compile": results["compile"]},
                "wall_time": {"compile": walls["compile"]},
                "log": {"compile": logs["compile"]},
            }
        )
        return results["compile"]
