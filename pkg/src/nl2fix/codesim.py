"""Code similarity between a candidate patch and a reference fragment.

Four components: token BLEU, keyword-weighted BLEU, syntax subtree match,
and def-use dataflow match, combined as a weighted sum (weights renormalize
when the dataflow component is absent).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .cst import JAVA_KEYWORDS, Node, ParseError, load_keywords, parse, parse_prefix, tokenize

__all__ = [
    "ReferenceUnparsable",
    "SimilarityReport",
    "bleu",
    "codebleu",
    "dataflow_match",
    "default_keywords",
    "load_keywords",
    "syntax_match",
    "tokenize",
    "weighted_keyword_bleu",
]

_MAX_N = 4
_KEYWORD_WEIGHT = 5.0
_DEFAULT_WEIGHTS = (0.25, 0.25, 0.25, 0.25)


class ReferenceUnparsable(Exception):
    pass


def default_keywords(language: str = "java") -> frozenset[str]:
    return JAVA_KEYWORDS


@dataclass(frozen=True)
class SimilarityReport:
    bleu: float
    keyword_bleu: float
    syntax_match: float
    dataflow_match: float | None
    codebleu: float
    weights: tuple[float, float, float, float]


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _clipped_matches(cand: Sequence[str], ref: Sequence[str], n: int) -> tuple[int, int]:
    cand_counts = _ngram_counts(cand, n)
    ref_counts = _ngram_counts(ref, n)
    matched = sum(min(count, ref_counts[g]) for g, count in cand_counts.items())
    total = max(len(cand) - n + 1, 0)
    return matched, total


def _brevity_penalty(cand_len: int, ref_len: int) -> float:
    if cand_len >= ref_len:
        return 1.0
    return math.exp(1.0 - ref_len / cand_len)


def _geometric(precisions: Sequence[float]) -> float:
    return math.exp(sum(math.log(p) for p in precisions) / len(precisions))


def bleu(candidate: Sequence[str], reference: Sequence[str], max_n: int = _MAX_N) -> float:
    """Modified n-gram precision BLEU with add-one smoothing on zero counts
    for orders >= 2 and a one-sided brevity penalty."""
    if not candidate:
        return 0.0
    precisions: list[float] = []
    for n in range(1, max_n + 1):
        matched, total = _clipped_matches(candidate, reference, n)
        if n == 1:
            if matched == 0:
                return 0.0
            precisions.append(matched / total)
        elif matched == 0 or total == 0:
            precisions.append((matched + 1) / (total + 1))
        else:
            precisions.append(matched / total)
    return _brevity_penalty(len(candidate), len(reference)) * _geometric(precisions)


def weighted_keyword_bleu(
    candidate: Sequence[str],
    reference: Sequence[str],
    keywords: frozenset[str] | set[str],
    max_n: int = _MAX_N,
) -> float:
    """BLEU whose unigram precision weights keyword tokens 5:1; higher
    orders are the plain modified precisions."""
    if not keywords:
        raise ValueError("keyword set must be nonempty")
    if not candidate:
        return 0.0
    cand_counts = Counter(candidate)
    ref_counts = Counter(reference)
    weighted_matched = 0.0
    weighted_total = 0.0
    for token, count in cand_counts.items():
        weight = _KEYWORD_WEIGHT if token in keywords else 1.0
        weighted_matched += weight * min(count, ref_counts[token])
        weighted_total += weight * count
    if weighted_total == 0 or weighted_matched == 0:
        return 0.0
    precisions = [weighted_matched / weighted_total]
    for n in range(2, max_n + 1):
        matched, total = _clipped_matches(candidate, reference, n)
        if matched == 0 or total == 0:
            precisions.append((matched + 1) / (total + 1))
        else:
            precisions.append(matched / total)
    return _brevity_penalty(len(candidate), len(reference)) * _geometric(precisions)


def _subtree_signatures(tree: Node) -> Counter:
    """One signature per internal node: its kind plus ordered child kinds."""
    signatures: Counter = Counter()
    stack = [tree]
    while stack:
        node = stack.pop()
        if node.children:
            signatures[
                node.kind + "(" + ",".join(c.kind for c in node.children) + ")"
            ] += 1
            stack.extend(node.children)
    return signatures


def syntax_match(candidate: str, reference: str, language: str = "java") -> float:
    """Fraction of the reference tree's internal-node expansions present in
    the candidate tree, counted with multiplicity. The candidate is parsed
    as far as it goes; an unparsable reference is an error."""
    try:
        ref_tree = parse(reference, language)
    except ParseError as exc:
        raise ReferenceUnparsable(str(exc)) from exc
    cand_tree = parse_prefix(candidate, language)
    ref_sigs = _subtree_signatures(ref_tree)
    total = sum(ref_sigs.values())
    if total == 0:
        return 0.0
    cand_sigs = _subtree_signatures(cand_tree)
    matched = sum(min(count, cand_sigs[sig]) for sig, count in ref_sigs.items())
    return matched / total


def _defuse_edges(tree: Node) -> Counter:
    """Multiset of (variable placeholder, governing-definition index) pairs,
    one per use; placeholders follow first-definition order, so consistently
    renamed code yields identical edges."""
    placeholder: dict[str, int] = {}
    def_count: dict[str, int] = {}
    edges: Counter = Counter()

    def define(name: str) -> None:
        if name not in placeholder:
            placeholder[name] = len(placeholder)
        def_count[name] = def_count.get(name, 0) + 1

    def use(name: str) -> None:
        defs = def_count.get(name, 0)
        if defs:
            edges[(placeholder[name], defs - 1)] += 1

    def walk(node: Node) -> None:
        kind = node.kind
        if kind == "param":
            for child in node.children:
                walk(child)
            if node.text:
                define(node.text)
            return
        if kind == "declarator":
            for child in node.children:
                walk(child)
            if node.text:
                define(node.text)
            return
        if kind.startswith("assign_"):
            lhs, rhs = node.children
            if lhs.kind == "ident" and lhs.text:
                if kind != "assign_=":
                    use(lhs.text)
                walk(rhs)
                define(lhs.text)
                return
            walk(lhs)
            walk(rhs)
            return
        if kind in ("unary_++", "unary_--", "postfix_++", "postfix_--"):
            operand = node.children[0]
            if operand.kind == "ident" and operand.text:
                use(operand.text)
                define(operand.text)
                return
            walk(operand)
            return
        if kind == "ident":
            if node.text:
                use(node.text)
            return
        for child in node.children:
            walk(child)

    walk(tree)
    return edges


def dataflow_match(candidate: str, reference: str, language: str = "java") -> float | None:
    """Share of the reference's def-use edges found in the candidate, or
    None when the reference has no edges at all."""
    ref_edges = _defuse_edges(parse_prefix(reference, language))
    total = sum(ref_edges.values())
    if total == 0:
        return None
    cand_edges = _defuse_edges(parse_prefix(candidate, language))
    matched = sum(min(count, cand_edges[e]) for e, count in ref_edges.items())
    return matched / total


def codebleu(
    candidate: str,
    reference: str,
    language: str = "java",
    weights: tuple[float, float, float, float] = _DEFAULT_WEIGHTS,
    keywords: frozenset[str] | None = None,
) -> SimilarityReport:
    """Weighted combination of the four components; when the dataflow
    component is absent the remaining weights are renormalized."""
    if len(weights) != 4 or any(w < 0 for w in weights):
        raise ValueError(f"weights must be 4 nonnegative values, got {weights!r}")
    if sum(weights) <= 0:
        raise ValueError("weights must not all be zero")
    if keywords is None:
        keywords = default_keywords(language)
    cand_tokens = tokenize(candidate, language)
    ref_tokens = tokenize(reference, language)
    b = bleu(cand_tokens, ref_tokens)
    w = weighted_keyword_bleu(cand_tokens, ref_tokens, keywords)
    s = syntax_match(candidate, reference, language)
    d = dataflow_match(candidate, reference, language)
    alpha, beta, gamma, delta = weights
    if d is None:
        mass = alpha + beta + gamma
        if mass <= 0:
            raise ValueError("dataflow absent and remaining weights are zero")
        score = (alpha * b + beta * w + gamma * s) / mass
    else:
        score = (alpha * b + beta * w + gamma * s + delta * d) / sum(weights)
    return SimilarityReport(
        bleu=b,
        keyword_bleu=w,
        syntax_match=s,
        dataflow_match=d,
        codebleu=score,
        weights=tuple(weights),
    )
