"""Evaluation mathematics for patch-generation runs.

Covers pass@k and its aggregation, whitespace-insensitive exact match,
per-run summary percentages, cross-model overlap accounting, and the
distribution statistics used by the similarity analyses (quartiles,
excess kurtosis, one-sided Wilcoxon signed-rank test).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class MetricsError(Exception):
    pass


class DomainError(MetricsError):
    """An argument lies outside the documented domain."""


class EmptyInput(MetricsError):
    pass


class InsufficientData(MetricsError):
    pass


class AllZeroDifferences(MetricsError):
    pass


class TooFewPairs(MetricsError):
    pass


@dataclass(frozen=True)
class BugResult:
    """Per-bug tallies over one run's candidate set.

    `c` counts plausible candidates, `compile_count` those that compile,
    `unique_count` the distinct canonical forms, and `em_count` the
    candidates that exactly match the ground-truth fix ignoring whitespace.
    """

    bug_id: str
    project: str
    n: int
    c: int
    compile_count: int
    unique_count: int
    em_count: int


_WHITESPACE_TABLE = str.maketrans("", "", " \t\r\n\f")


def canonical_form(code: str) -> str:
    """Strip space, tab, CR, LF and FF; all other bytes kept in order."""
    return code.translate(_WHITESPACE_TABLE)


def pass_at_k(n: int, c: int, k: int) -> float:
    """Chance that at least one of k draws (without replacement) from n
    candidates, c of them correct, is correct: 1 - C(n-c,k)/C(n,k).

    Uses the telescoping product of (n-c-i)/(n-i), so no binomial blow-up
    for large n; k=1 short-circuits to c/n so pass@1 is bit-exact.
    """
    if not 0 <= c <= n:
        raise DomainError(f"need 0 <= c <= n, got c={c}, n={n}")
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    if k == 1:
        return c / n
    if c == 0:
        return 0.0
    if n - c < k:
        return 1.0
    miss = 1.0
    for i in range(k):
        miss *= (n - c - i) / (n - i)
    return 1.0 - miss


def aggregate_pass_at_k(results: Sequence[BugResult], k: int) -> float:
    """Unweighted mean of per-bug pass@k (each bug gets one vote)."""
    if not results:
        raise EmptyInput("no bug results to aggregate")
    for r in results:
        if r.n < k:
            raise DomainError(f"bug {r.bug_id} has n={r.n} < k={k}")
    return sum(pass_at_k(r.n, r.c, k) for r in results) / len(results)


@dataclass(frozen=True)
class SummaryStats:
    duplicate_pct: float
    compile_pct: float
    plausible_pct: float


def summary_stats(results: Sequence[BugResult]) -> SummaryStats:
    """Per-bug duplicate/compile/plausible percentages, averaged over bugs."""
    if not results:
        raise EmptyInput("no bug results")
    dup, comp, plaus = 0.0, 0.0, 0.0
    for r in results:
        if r.n < 1:
            raise DomainError(f"bug {r.bug_id} has no candidates")
        dup += 100.0 * (1.0 - r.unique_count / r.n)
        comp += 100.0 * r.compile_count / r.n
        plaus += 100.0 * r.c / r.n
    m = len(results)
    return SummaryStats(dup / m, comp / m, plaus / m)


def overlap(fixed_sets: Mapping[str, Iterable[str]]) -> dict:
    """Exact-membership region counts for 1-3 models' fixed-bug sets.

    Region keys are the sorted member model ids joined with "&"; every
    nonempty model subset appears, zero counts included.
    """
    if not 1 <= len(fixed_sets) <= 3:
        raise DomainError(f"need 1-3 models, got {len(fixed_sets)}")
    sets = {m: frozenset(v) for m, v in fixed_sets.items()}
    models = sorted(sets)
    union: set[str] = set()
    for s in sets.values():
        union |= s
    regions: dict[str, int] = {}
    for size in range(1, len(models) + 1):
        for members in _subsets(models, size):
            inside = set(union)
            for m in members:
                inside &= sets[m]
            for m in models:
                if m not in members:
                    inside -= sets[m]
            regions["&".join(members)] = len(inside)
    return {
        "regions": regions,
        "union": len(union),
        "per_model": {m: len(sets[m]) for m in models},
    }


def _subsets(items: Sequence[str], size: int) -> Iterable[tuple[str, ...]]:
    from itertools import combinations

    return combinations(items, size)


def quantile(values: Sequence[float], p: float) -> float:
    """Linear-interpolation quantile at position (n-1)*p over sorted values."""
    if not values:
        raise EmptyInput("no values")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"quantile fraction out of range: {p}")
    ordered = sorted(values)
    pos = (len(ordered) - 1) * p
    lo = math.floor(pos)
    hi = math.ceil(pos)
    if lo == hi:
        return float(ordered[lo])
    frac = pos - lo
    return ordered[lo] * (1.0 - frac) + ordered[hi] * frac


def excess_kurtosis(samples: Sequence[float]) -> float:
    """Fisher excess kurtosis m4/m2^2 - 3 with biased central moments."""
    if len(set(samples)) < 2:
        raise InsufficientData("kurtosis needs at least 2 distinct values")
    n = len(samples)
    mean = sum(samples) / n
    m2 = sum((v - mean) ** 2 for v in samples) / n
    m4 = sum((v - mean) ** 4 for v in samples) / n
    return m4 / (m2 * m2) - 3.0


@dataclass(frozen=True)
class DistributionSummary:
    median: float
    q1: float
    q3: float
    iqr: float
    kurtosis: float | None  # None when all values coincide


def distribution_summary(samples: Sequence[float]) -> DistributionSummary:
    if len(samples) < 4:
        raise InsufficientData(f"quartiles need >= 4 samples, got {len(samples)}")
    q1 = quantile(samples, 0.25)
    med = quantile(samples, 0.5)
    q3 = quantile(samples, 0.75)
    try:
        kurt: float | None = excess_kurtosis(samples)
    except InsufficientData:
        kurt = None
    return DistributionSummary(med, q1, q3, q3 - q1, kurt)


def _midranks(values: Sequence[float]) -> list[float]:
    """Ranks 1..n with ties sharing the mean of their rank block."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2.0 + 1.0
        for idx in order[i : j + 1]:
            ranks[idx] = rank
        i = j + 1
    return ranks


# Enumerating sign assignments is exact but only affordable for small m;
# beyond this the tie-corrected normal approximation takes over.
_EXACT_LIMIT = 20


def wilcoxon_signed_rank_one_sided(
    x: Sequence[float], y: Sequence[float]
) -> float:
    """One-sided Wilcoxon signed-rank p-value for H1: median(x - y) > 0.

    Zero differences are dropped; |d| ranks use mid-ranks for ties. For up
    to 20 pairs the null distribution of W+ is enumerated exactly (via a
    subset-sum count over doubled ranks); larger samples use the normal
    approximation with tie correction and a 0.5 continuity correction.
    """
    if len(x) != len(y):
        raise DomainError("paired sequences differ in length")
    diffs = [a - b for a, b in zip(x, y)]
    nonzero = [d for d in diffs if d != 0]
    if not nonzero:
        raise AllZeroDifferences("every pair is identical")
    m = len(nonzero)
    if m < 5:
        raise TooFewPairs(f"need >= 5 nonzero pairs, got {m}")
    ranks = _midranks([abs(d) for d in nonzero])
    w_plus = sum(r for d, r in zip(nonzero, ranks) if d > 0)

    if m <= _EXACT_LIMIT:
        doubled = [round(2 * r) for r in ranks]
        target = round(2 * w_plus)
        counts = [0] * (sum(doubled) + 1)
        counts[0] = 1
        for r in doubled:
            for s in range(len(counts) - 1 - r, -1, -1):
                if counts[s]:
                    counts[s + r] += counts[s]
        ge = sum(counts[target:])
        return ge / (1 << m)

    mean = m * (m + 1) / 4.0
    tie_term = 0.0
    seen: dict[float, int] = {}
    for d in nonzero:
        seen[abs(d)] = seen.get(abs(d), 0) + 1
    for t in seen.values():
        tie_term += (t**3 - t) / 48.0
    var = m * (m + 1) * (2 * m + 1) / 24.0 - tie_term
    z = (w_plus - mean - 0.5) / math.sqrt(var)
    p = 0.5 * math.erfc(z / math.sqrt(2.0))
    return min(max(p, 5e-324), 1.0)
