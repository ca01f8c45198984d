"""Harness for evaluating and ranking LLM-generated bug-fix patches."""

__version__ = "0.1.0"

from .corpus import BugRecord, Corpus, load_corpus, save_corpus, strip_comments
from .metrics import BugResult, canonical_form, pass_at_k
from .prompts import PromptSpec, Strategy, build_prompt
from .sampling import CandidatePatch, GenParams
from .validation import PatchStatus, ValidationOutcome

__all__ = [
    "BugRecord",
    "BugResult",
    "CandidatePatch",
    "Corpus",
    "GenParams",
    "PatchStatus",
    "PromptSpec",
    "Strategy",
    "ValidationOutcome",
    "__version__",
    "build_prompt",
    "canonical_form",
    "load_corpus",
    "pass_at_k",
    "save_corpus",
    "strip_comments",
]
