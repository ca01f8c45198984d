"""Prompt construction for the four prompting strategies.

The canonical wording lives in text assets under templates/; builders render
them section by section so that empty title/description sections vanish
cleanly and budget fitting can truncate individual sections later. Every
builder guards against leaking a bug's own ground-truth fix into its prompt.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace as dc_replace
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import BugRecord, Corpus


class PromptError(Exception):
    pass


class NoExampleAvailable(PromptError):
    pass


class TargetTooLarge(PromptError):
    pass


class FixLeakError(PromptError):
    """A bug's own ground-truth fix ended up in its own prompt."""


class Strategy(str, Enum):
    ZERO_SHOT = "zero-shot"
    TITLE_ONLY = "title-only"
    ONE_SHOT = "one-shot"
    REASONING = "reasoning"


class Role(str, Enum):
    SYSTEM = "system"
    USER = "user"
    ASSISTANT_PLACEHOLDER = "assistant-placeholder"


@dataclass(frozen=True)
class Fragment:
    """One renderable slice of a turn: header prefix, content, separator.

    A fragment with empty content renders to nothing at all, which is how
    omitted sections and fully truncated sections disappear.
    """

    kind: str
    prefix: str
    content: str
    suffix: str

    def render(self) -> str:
        if not self.content:
            return ""
        return self.prefix + self.content + self.suffix


@dataclass(frozen=True)
class Turn:
    role: Role
    text: str
    fragments: tuple[Fragment, ...] = ()


@dataclass(frozen=True)
class PromptSpec:
    bug_id: str
    strategy: Strategy
    turns: tuple[Turn, ...]
    completion_suffix: str | None
    token_estimate: int


_TEMPLATE_DIR = Path(__file__).parent / "templates"
_UNIT_RE = re.compile(r"\w+|[^\w\s]")
_PLACEHOLDER_RE = re.compile(r"\{(\w+)\}")

# Conservative provider-agnostic token estimate; deliberately the single
# place to swap in a real tokenizer.
_TOKENS_PER_UNIT = 1.3


def estimate_tokens(text: str) -> int:
    return math.ceil(len(_UNIT_RE.findall(text)) * _TOKENS_PER_UNIT)


def _load_template(name: str) -> str:
    return (_TEMPLATE_DIR / name).read_text(encoding="utf-8")


_ZERO_SHOT = _load_template("zero_shot.txt")
_ONE_SHOT_EXAMPLE = _load_template("one_shot_example.txt")
_RE_STAGES = tuple(_load_template(f"re{i}.txt") for i in (1, 2, 3))

# Sections that disappear when their value is empty (no dangling headers).
_OMIT_EMPTY = frozenset(
    {"target_title", "target_description", "example_title", "example_description"}
)


def _template_fragments(
    template: str, kind_by_placeholder: Mapping[str, str], values: Mapping[str, str]
) -> list[Fragment]:
    """Split a template into fragments on blank lines, one per section."""
    parts = template.split("\n\n")
    fragments: list[Fragment] = []
    for i, part in enumerate(parts):
        section_suffix = "\n\n" if i < len(parts) - 1 else ""
        match = _PLACEHOLDER_RE.search(part)
        if match is None:
            fragments.append(Fragment("static", "", part, section_suffix))
            continue
        kind = kind_by_placeholder[match.group(1)]
        prefix = part[: match.start()]
        suffix = part[match.end() :] + section_suffix
        # Static preamble lines (e.g. the example banner) must survive even
        # when the placeholder's section is omitted; the header line itself
        # stays attached to the fragment so it vanishes with the content.
        newline = prefix.rfind("\n", 0, max(len(prefix) - 1, 0))
        if newline >= 0:
            fragments.append(Fragment("static", "", prefix[: newline + 1], ""))
            prefix = prefix[newline + 1 :]
        value = values[match.group(1)]
        if kind in _OMIT_EMPTY and not value:
            continue
        fragments.append(Fragment(kind, prefix, value, suffix))
    return fragments


def _render(fragments: Sequence[Fragment]) -> str:
    return "".join(f.render() for f in fragments)


def method_signature(code: str) -> str:
    """Header of a method up to its opening brace, whitespace-collapsed."""
    brace = code.find("{")
    if brace >= 0:
        collapsed = " ".join(code[:brace].split())
        return collapsed + " {" if collapsed else "{"
    first = code.splitlines()[0] if code else ""
    return " ".join(first.split())


def _guard_no_fix_leak(record: BugRecord, turns: Sequence[Turn]) -> None:
    if not record.fixed_function:
        return
    for turn in turns:
        if record.fixed_function in turn.text:
            raise FixLeakError(f"prompt for {record.bug_id} contains its own fix")


def _spec_from_turns(
    record: BugRecord, strategy: Strategy, turns: Sequence[Turn]
) -> PromptSpec:
    _guard_no_fix_leak(record, turns)
    suffix = method_signature(record.buggy_function)
    estimate = sum(estimate_tokens(t.text) for t in turns) + estimate_tokens(suffix)
    return PromptSpec(
        bug_id=record.bug_id,
        strategy=strategy,
        turns=tuple(turns),
        completion_suffix=suffix,
        token_estimate=estimate,
    )


_TARGET_KINDS = {
    "title": "target_title",
    "description": "target_description",
    "buggy_function": "target_buggy",
}
_EXAMPLE_KINDS = {
    "title": "example_title",
    "description": "example_description",
    "buggy_function": "example_buggy",
    "fixed_function": "example_fixed",
}


def _target_fragments(record: BugRecord, description: str) -> list[Fragment]:
    return _template_fragments(
        _ZERO_SHOT,
        _TARGET_KINDS,
        {
            "title": record.issue_title,
            "description": description,
            "buggy_function": record.buggy_function,
        },
    )


def build_zero_shot(record: BugRecord) -> PromptSpec:
    """Issue title + description + buggy code + fix instruction, one turn."""
    fragments = _target_fragments(record, record.issue_description)
    turn = Turn(Role.USER, _render(fragments), tuple(fragments))
    return _spec_from_turns(record, Strategy.ZERO_SHOT, [turn])


def build_title_only(record: BugRecord) -> PromptSpec:
    """Zero-shot prompt with the description section deleted."""
    fragments = _target_fragments(record, "")
    turn = Turn(Role.USER, _render(fragments), tuple(fragments))
    return _spec_from_turns(record, Strategy.TITLE_ONLY, [turn])


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance over characters, unit-cost edits."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i] + [0] * len(b)
        for j, cb in enumerate(b, 1):
            cost = 0 if ca == cb else 1
            current[j] = min(
                previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost
            )
        previous = current
    return previous[len(b)]


def nearest_example(record: BugRecord, corpus: Corpus) -> BugRecord:
    """Other record with minimal edit distance to the target's buggy code;
    ties go to the lexicographically smallest bug_id."""
    best: BugRecord | None = None
    best_key: tuple[int, str] | None = None
    for candidate in corpus:
        if candidate.bug_id == record.bug_id:
            continue
        key = (edit_distance(candidate.buggy_function, record.buggy_function),
               candidate.bug_id)
        if best_key is None or key < best_key:
            best, best_key = candidate, key
    if best is None:
        raise NoExampleAvailable(f"no other record to pair with {record.bug_id}")
    return best


def build_one_shot(record: BugRecord, corpus: Corpus) -> PromptSpec:
    """Worked example (nearest bug by edit distance) followed by the target."""
    example = nearest_example(record, corpus)
    fragments = _template_fragments(
        _ONE_SHOT_EXAMPLE,
        _EXAMPLE_KINDS,
        {
            "title": example.issue_title,
            "description": example.issue_description,
            "buggy_function": example.buggy_function,
            "fixed_function": example.fixed_function,
        },
    )
    fragments += _target_fragments(record, record.issue_description)
    turn = Turn(Role.USER, _render(fragments), tuple(fragments))
    return _spec_from_turns(record, Strategy.ONE_SHOT, [turn])


def build_reasoning_turns(record: BugRecord) -> PromptSpec:
    """Three staged user turns: localize, explain, then fix.

    Stage templates only; provider replies are spliced between stages by the
    sampling layer at run time.
    """
    stage1 = _template_fragments(
        _RE_STAGES[0],
        _TARGET_KINDS,
        {
            "title": record.issue_title,
            "description": record.issue_description,
            "buggy_function": record.buggy_function,
        },
    )
    turns = [Turn(Role.USER, _render(stage1), tuple(stage1))]
    for template in _RE_STAGES[1:]:
        frag = Fragment("static", "", template, "")
        turns.append(Turn(Role.USER, template, (frag,)))
    return _spec_from_turns(record, Strategy.REASONING, turns)


def build_prompt(record: BugRecord, strategy: Strategy, corpus: Corpus) -> PromptSpec:
    if strategy is Strategy.ZERO_SHOT:
        return build_zero_shot(record)
    if strategy is Strategy.TITLE_ONLY:
        return build_title_only(record)
    if strategy is Strategy.ONE_SHOT:
        return build_one_shot(record, corpus)
    if strategy is Strategy.REASONING:
        return build_reasoning_turns(record)
    raise PromptError(f"unknown strategy {strategy!r}")


# Tail-truncation ladder; target code and the instruction are untouchable.
_TRUNCATION_ORDER = (
    "example_fixed",
    "example_buggy",
    "example_description",
    "example_title",
    "target_description",
)


def _drop_tail_units(content: str, drop: int) -> str:
    spans = [m.span() for m in _UNIT_RE.finditer(content)]
    keep = len(spans) - drop
    if keep <= 0:
        return ""
    return content[: spans[keep - 1][1]]


def fit_to_budget(prompt: PromptSpec, context_budget: int, reserve: int) -> PromptSpec:
    """Truncate low-priority sections until the prompt fits the context
    window minus generation headroom; raise TargetTooLarge if the
    untouchable target sections alone exceed it."""
    if reserve >= context_budget:
        raise PromptError(
            f"reserve {reserve} must be smaller than context budget {context_budget}"
        )
    limit = context_budget - reserve
    if prompt.token_estimate <= limit:
        return prompt

    turns = [list(t.fragments) for t in prompt.turns]
    suffix_tokens = (
        estimate_tokens(prompt.completion_suffix) if prompt.completion_suffix else 0
    )

    def current_estimate() -> int:
        return sum(estimate_tokens(_render(frags)) for frags in turns) + suffix_tokens

    estimate = current_estimate()
    for kind in _TRUNCATION_ORDER:
        if estimate <= limit:
            break
        for frags in turns:
            for i, frag in enumerate(frags):
                if frag.kind != kind or not frag.content:
                    continue
                while frag.content and estimate > limit:
                    drop = max(1, math.ceil((estimate - limit) / _TOKENS_PER_UNIT))
                    frag = dc_replace(frag, content=_drop_tail_units(frag.content, drop))
                    frags[i] = frag
                    estimate = current_estimate()

    if estimate > limit:
        raise TargetTooLarge(
            f"{prompt.bug_id}: target sections alone need ~{estimate} tokens, "
            f"budget leaves {limit}"
        )
    new_turns = tuple(
        Turn(turn.role, _render(frags), tuple(frags))
        for turn, frags in zip(prompt.turns, turns)
    )
    return dc_replace(prompt, turns=new_turns, token_estimate=estimate)
