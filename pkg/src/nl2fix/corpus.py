"""Benchmark corpus of single-method bug records.

Records arrive as JSON lines (UTF-8, LF). Loading strips comments from the
buggy function, validates every record, and rejects duplicate ids; the
resulting corpus is immutable and iterates in file order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator, Sequence

from .metrics import canonical_form


class CorpusError(Exception):
    pass


class MalformedLine(CorpusError):
    def __init__(self, line_no: int, detail: str = ""):
        self.line_no = line_no
        super().__init__(f"line {line_no} is not a valid record{': ' + detail if detail else ''}")


class DuplicateBugId(CorpusError):
    def __init__(self, bug_id: str):
        self.bug_id = bug_id
        super().__init__(f"duplicate bug_id {bug_id!r}")


class InvalidRecord(CorpusError):
    def __init__(self, bug_id: str, violations: Sequence[str]):
        self.bug_id = bug_id
        self.violations = list(violations)
        super().__init__(f"record {bug_id!r}: " + "; ".join(violations))


class UnterminatedBlockComment(CorpusError):
    def __init__(self, offset: int):
        self.offset = offset
        super().__init__(f"block comment opened at offset {offset} never closes")


@dataclass(frozen=True)
class BugRecord:
    """One benchmark instance: issue text, buggy method, fix, and the shell
    commands that provision/compile/test a pre-fix workspace.

    `fixed_function` is evaluation-only; it must never be rendered into a
    prompt for this same bug (other bugs may borrow it as a worked example).
    """

    bug_id: str
    project: str
    issue_title: str
    issue_description: str
    buggy_function: str
    fixed_function: str
    file_path: str
    method_span: tuple[int, int]
    workspace_setup_cmd: str
    compile_cmd: str
    regression_cmd: str
    trigger_cmd: str
    language: str = "java"

    def to_dict(self) -> dict:
        return {
            "bug_id": self.bug_id,
            "project": self.project,
            "issue_title": self.issue_title,
            "issue_description": self.issue_description,
            "buggy_function": self.buggy_function,
            "fixed_function": self.fixed_function,
            "file_path": self.file_path,
            "method_span": list(self.method_span),
            "language": self.language,
            "workspace_setup_cmd": self.workspace_setup_cmd,
            "compile_cmd": self.compile_cmd,
            "regression_cmd": self.regression_cmd,
            "trigger_cmd": self.trigger_cmd,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "BugRecord":
        span = obj["method_span"]
        return cls(
            bug_id=obj["bug_id"],
            project=obj["project"],
            issue_title=obj.get("issue_title", ""),
            issue_description=obj.get("issue_description", ""),
            buggy_function=obj["buggy_function"],
            fixed_function=obj["fixed_function"],
            file_path=obj["file_path"],
            method_span=(int(span[0]), int(span[1])),
            language=obj.get("language", "java"),
            workspace_setup_cmd=obj["workspace_setup_cmd"],
            compile_cmd=obj["compile_cmd"],
            regression_cmd=obj["regression_cmd"],
            trigger_cmd=obj["trigger_cmd"],
        )


@dataclass(frozen=True)
class Corpus:
    records: tuple[BugRecord, ...]
    source_path: str
    _by_id: dict = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        self._by_id.update({r.bug_id: r for r in self.records})

    def __iter__(self) -> Iterator[BugRecord]:
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def get(self, bug_id: str) -> BugRecord:
        return self._by_id[bug_id]

    def __contains__(self, bug_id: str) -> bool:
        return bug_id in self._by_id


def strip_comments(source: str, language: str = "java") -> str:
    """Drop line (//...) and block (/*...*/) comments from source text.

    Comment delimiters inside string/char literals survive. A line that
    loses a comment is right-trimmed, and dropped entirely if nothing but
    whitespace remains; untouched lines keep their exact bytes.
    """
    out: list[str] = []
    touched: set[int] = set()  # output line indices that lost a comment
    line_idx = 0
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch == "/" and i + 1 < n and source[i + 1] == "/":
            touched.add(line_idx)
            i += 2
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "*":
            end = source.find("*/", i + 2)
            if end == -1:
                raise UnterminatedBlockComment(i)
            touched.add(line_idx)
            i = end + 2
            continue
        if ch in ('"', "'"):
            quote = ch
            out.append(ch)
            i += 1
            while i < n:
                c = source[i]
                out.append(c)
                i += 1
                if c == "\\" and i < n:
                    out.append(source[i])
                    i += 1
                    continue
                if c == quote:
                    break
                if c == "\n":  # literal never spans lines; bail out of state
                    line_idx += 1
                    break
            continue
        out.append(ch)
        if ch == "\n":
            line_idx += 1
        i += 1

    lines = "".join(out).split("\n")
    kept: list[str] = []
    for idx, text in enumerate(lines):
        if idx in touched:
            text = text.rstrip()
            if not text:
                continue
        kept.append(text)
    return "\n".join(kept)


def validate_record(record: BugRecord) -> list[str]:
    """Return every invariant violation (empty list means the record is ok)."""
    violations: list[str] = []
    if not record.bug_id:
        violations.append("bug_id empty")
    start, end = record.method_span
    if start < 1:
        violations.append("span start must be >= 1")
    if start > end:
        violations.append("span inverted")
    if canonical_form(record.buggy_function) == canonical_form(record.fixed_function):
        violations.append("buggy_function equals fixed_function ignoring whitespace")
    try:
        if strip_comments(record.buggy_function, record.language) != record.buggy_function:
            violations.append("buggy_function contains comments")
    except UnterminatedBlockComment:
        violations.append("buggy_function has an unterminated block comment")
    return violations


def load_corpus(path: str | Path) -> Corpus:
    """Load a JSONL corpus, stripping comments from each buggy function."""
    records: list[BugRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLine(line_no, exc.msg) from exc
            if not isinstance(obj, dict):
                raise MalformedLine(line_no, "not a JSON object")
            try:
                record = BugRecord.from_dict(obj)
            except (KeyError, TypeError, ValueError, IndexError) as exc:
                raise MalformedLine(line_no, f"bad field: {exc}") from exc
            try:
                stripped = strip_comments(record.buggy_function, record.language)
            except UnterminatedBlockComment:
                raise InvalidRecord(
                    record.bug_id, ["buggy_function has an unterminated block comment"]
                ) from None
            record = replace(record, buggy_function=stripped)
            violations = validate_record(record)
            if violations:
                raise InvalidRecord(record.bug_id, violations)
            if record.bug_id in seen:
                raise DuplicateBugId(record.bug_id)
            seen.add(record.bug_id)
            records.append(record)
    return Corpus(records=tuple(records), source_path=str(path))


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write records back out as JSON lines (LF, UTF-8); load/save round-trips."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in corpus:
            fh.write(json.dumps(record.to_dict(), ensure_ascii=False))
            fh.write("\n")
