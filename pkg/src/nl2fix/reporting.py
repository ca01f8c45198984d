"""Report emission: delimited tables, JSON summaries, and rendered figures."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from . import metrics
from .metrics import BugResult

K_GRID = (1, 2, 5, 10, 20, 50, 100)


def _fmt(value: float) -> str:
    return f"{value:.6f}"


@dataclass(frozen=True)
class PassAtKRow:
    k: int
    k_effective: int
    value: float
    capped: bool


def passk_rows(bug_results: Sequence[BugResult], k_grid: Sequence[int] = K_GRID) -> list[PassAtKRow]:
    """Aggregate pass@k over the grid, capping k at the per-run sample count."""
    n_min = min(r.n for r in bug_results)
    rows = []
    for k in k_grid:
        k_eff = min(k, n_min)
        rows.append(
            PassAtKRow(
                k=k,
                k_effective=k_eff,
                value=metrics.aggregate_pass_at_k(bug_results, k_eff),
                capped=k_eff != k,
            )
        )
    return rows


def write_passk_csv(path: Path, rows: Sequence[PassAtKRow]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k", "k_effective", "pass_at_k", "capped"])
        for row in rows:
            writer.writerow([row.k, row.k_effective, _fmt(row.value), str(row.capped).lower()])


def render_passk_figure(path: Path, rows: Sequence[PassAtKRow]) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ks = [r.k_effective for r in rows]
    vals = [100.0 * r.value for r in rows]
    ax.plot(ks, vals, marker="o")
    ax.set_xscale("log")
    ax.set_xticks(ks)
    ax.get_xaxis().set_major_formatter(plt.ScalarFormatter())
    ax.set_xlabel("k")
    ax.set_ylabel("pass@k (%)")
    ax.set_title("pass@k")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def summary_payload(
    bug_results: Sequence[BugResult],
    rows: Sequence[PassAtKRow],
    meta: Mapping,
) -> dict:
    stats = metrics.summary_stats(bug_results)
    warnings = [
        f"k={row.k} capped to {row.k_effective} (only {row.k_effective} samples per bug)"
        for row in rows
        if row.capped
    ]
    return {
        "model": meta.get("model"),
        "strategy": meta.get("strategy"),
        "temperature": meta.get("temperature"),
        "n_samples": meta.get("n_samples"),
        "bugs": len(bug_results),
        "fixed_bugs": sum(1 for r in bug_results if r.c >= 1),
        "em_bugs": sum(1 for r in bug_results if r.em_count >= 1),
        "plausible_patches": sum(r.c for r in bug_results),
        "em_patches": sum(r.em_count for r in bug_results),
        "duplicate_pct": stats.duplicate_pct,
        "compile_pct": stats.compile_pct,
        "plausible_pct": stats.plausible_pct,
        "pass_at_k": {str(row.k): row.value for row in rows},
        "warnings": warnings,
    }


def write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


def write_per_project_csv(path: Path, bug_results: Sequence[BugResult]) -> None:
    by_project: dict[str, list[BugResult]] = {}
    for r in bug_results:
        by_project.setdefault(r.project, []).append(r)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["project", "bugs", "fixed_bugs", "plausible_patches", "em_patches"])
        for project in sorted(by_project):
            rows = by_project[project]
            writer.writerow(
                [
                    project,
                    len(rows),
                    sum(1 for r in rows if r.c >= 1),
                    sum(r.c for r in rows),
                    sum(r.em_count for r in rows),
                ]
            )


def distribution_dict(values: Sequence[float]) -> dict | None:
    try:
        summary = metrics.distribution_summary(values)
    except metrics.InsufficientData:
        return None
    payload = asdict(summary)
    payload["count"] = len(values)
    return payload


def wilcoxon_dict(x: Sequence[float], y: Sequence[float]) -> dict:
    try:
        return {"p_value": metrics.wilcoxon_signed_rank_one_sided(x, y), "note": None}
    except metrics.MetricsError as exc:
        return {"p_value": None, "note": f"{type(exc).__name__}: {exc}"}


def similarity_payload(
    to_buggy: Mapping[str, Sequence[float]],
    to_fixed: Mapping[str, Sequence[float]],
    buggy_medians_by_bug: Sequence[tuple[float, float]],
    paired_buggy_fixed: Sequence[tuple[float, float]],
) -> dict:
    """Distribution summaries plus the two one-sided Wilcoxon comparisons:
    plausible-vs-non-plausible similarity to the buggy code (paired by bug),
    and similarity-to-buggy vs similarity-to-fixed (paired by patch)."""
    payload: dict = {"to_buggy": {}, "to_fixed": {}, "wilcoxon": {}}
    for label, values in to_buggy.items():
        payload["to_buggy"][label] = distribution_dict(values)
    for label, values in to_fixed.items():
        payload["to_fixed"][label] = distribution_dict(values)
    payload["wilcoxon"]["plausible_gt_non_plausible_to_buggy"] = wilcoxon_dict(
        [m[0] for m in buggy_medians_by_bug], [m[1] for m in buggy_medians_by_bug]
    )
    payload["wilcoxon"]["to_buggy_gt_to_fixed_plausible"] = wilcoxon_dict(
        [p[0] for p in paired_buggy_fixed], [p[1] for p in paired_buggy_fixed]
    )
    return payload


def render_similarity_figure(
    path: Path,
    to_buggy: Mapping[str, Sequence[float]],
    to_fixed: Mapping[str, Sequence[float]],
) -> bool:
    """Box plots of the similarity distributions; returns False when there is
    nothing to draw."""
    panels = []
    for title, groups in (("vs buggy code", to_buggy), ("vs fixed code", to_fixed)):
        labels = [label for label, vals in groups.items() if vals]
        data = [list(groups[label]) for label in labels]
        if data:
            panels.append((title, labels, data))
    if not panels:
        return False
    fig, axes = plt.subplots(1, len(panels), figsize=(4.5 * len(panels), 3.5))
    if len(panels) == 1:
        axes = [axes]
    for ax, (title, labels, data) in zip(axes, panels):
        ax.boxplot(data, tick_labels=labels)
        ax.set_title(title)
        ax.set_ylabel("similarity")
        ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return True


def write_ranking_csv(path: Path, rows: Sequence[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["variant", "k", "r_pass_at_k_pct", "pass_at_k_pct"])
        for row in rows:
            writer.writerow(
                [row["variant"], row["k"], _fmt(row["r_pass"]), _fmt(row["pass"])]
            )
