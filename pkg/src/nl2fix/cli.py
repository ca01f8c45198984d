"""Command-line entry point and experiment orchestration.

Subcommands: generate -> validate -> report -> rank (run = all four).
Every phase is cache-backed and idempotent, so interrupted runs resume
cleanly and reruns with unchanged inputs produce byte-identical reports.

Exit codes: 0 success, 2 configuration/usage error, 3 provider exhausted,
4 validation infrastructure failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import metrics, ranking, reporting
from .corpus import BugRecord, Corpus, CorpusError, load_corpus
from .metrics import BugResult
from .prompts import PromptError, Strategy, build_prompt, fit_to_budget
from .sampling import (
    BudgetExceeded,
    CandidatePatch,
    GenMode,
    GenParams,
    HttpProvider,
    MockProvider,
    MockScriptError,
    ProviderExhausted,
    SampleCache,
    atomic_write_json,
    dedup_stats,
    prompt_digest,
    sample,
)
from .validation import (
    PatchStatus,
    RunnerScriptError,
    ScriptedRunner,
    SubprocessRunner,
    ValidationError,
    ValidationOutcome,
    Validator,
)


class ConfigError(Exception):
    pass


class UnknownBugId(ConfigError):
    pass


@dataclass
class ProviderConfig:
    kind: str
    base_url: str | None = None
    model_id: str | None = None
    api_key_env: str | None = None
    context_budget: int = 4096
    mode: str = "chat"
    script_path: str | None = None
    dimension: int = 512
    concurrency: int = 4


@dataclass
class ValidationConfig:
    workers: int = 4
    stage_timeout_s: float = 600.0
    runner: str = "subprocess"
    script_path: str | None = None


@dataclass
class RankingConfig:
    threshold: float | str = 0.95  # number, or "median"
    variant: str = "both"  # all | compile-pruned | both


@dataclass
class RunConfig:
    corpus_path: str
    cache_dir: str
    report_dir: str
    generation: ProviderConfig
    embedding: ProviderConfig = field(
        default_factory=lambda: ProviderConfig(kind="local")
    )
    strategy: str = "zero-shot"
    temperature: float = 0.8
    n_samples: int = 100
    max_gen_tokens: int = 750
    validation: ValidationConfig = field(default_factory=ValidationConfig)
    ranking: RankingConfig = field(default_factory=RankingConfig)
    bug_filter: list | None = None
    seed: int = 0

    @property
    def model_label(self) -> str:
        return self.generation.model_id or self.generation.kind


def _resolve(base: Path, value: str | None) -> str | None:
    if value is None:
        return None
    path = Path(value)
    return str(path if path.is_absolute() else (base / path))


def load_config(path: str | Path) -> RunConfig:
    """Parse a JSON run configuration; relative paths resolve against the
    config file's directory."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    base = path.parent

    def provider_block(key: str, default_kind: str) -> ProviderConfig:
        block = dict(raw.get(key, {}))
        block.setdefault("kind", default_kind)
        known = {f for f in ProviderConfig.__dataclass_fields__}
        unknown = set(block) - known
        if unknown:
            raise ConfigError(f"{key}: unknown fields {sorted(unknown)}")
        cfg = ProviderConfig(**block)
        cfg.script_path = _resolve(base, cfg.script_path)
        return cfg

    try:
        config = RunConfig(
            corpus_path=_resolve(base, raw["corpus_path"]),
            cache_dir=_resolve(base, raw.get("cache_dir", "cache")),
            report_dir=_resolve(base, raw.get("report_dir", "reports")),
            generation=provider_block("generation_provider", "mock"),
            embedding=provider_block("embedding_provider", "local"),
            strategy=raw.get("strategy", "zero-shot"),
            temperature=float(raw.get("temperature", 0.8)),
            n_samples=int(raw.get("n_samples", 100)),
            max_gen_tokens=int(raw.get("max_gen_tokens", 750)),
            validation=ValidationConfig(**raw.get("validation", {})),
            ranking=RankingConfig(**raw.get("ranking", {})),
            bug_filter=raw.get("bug_filter"),
            seed=int(raw.get("seed", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad config: {exc}") from exc
    config.validation.script_path = _resolve(base, config.validation.script_path)

    if not Path(config.corpus_path).exists():
        raise ConfigError(f"corpus not found: {config.corpus_path}")
    if config.n_samples < 1:
        raise ConfigError("n_samples must be >= 1")
    if config.temperature < 0:
        raise ConfigError("temperature must be >= 0")
    if config.strategy not in {s.value for s in Strategy}:
        raise ConfigError(f"unknown strategy {config.strategy!r}")
    if config.generation.kind == "mock":
        if not config.generation.script_path:
            raise ConfigError("mock generation provider needs script_path")
        if not Path(config.generation.script_path).exists():
            raise ConfigError(f"mock script not found: {config.generation.script_path}")
    if config.validation.runner == "scripted":
        if not config.validation.script_path:
            raise ConfigError("scripted runner needs script_path")
        if not Path(config.validation.script_path).exists():
            raise ConfigError(f"runner script not found: {config.validation.script_path}")
    if config.ranking.threshold != "median":
        try:
            config.ranking.threshold = float(config.ranking.threshold)
        except (TypeError, ValueError) as exc:
            raise ConfigError("ranking threshold must be a number or 'median'") from exc
    if config.ranking.variant not in ("all", "compile-pruned", "both"):
        raise ConfigError(f"unknown ranking variant {config.ranking.variant!r}")
    return config


# ---------------------------------------------------------------------------
# Shared builders
# ---------------------------------------------------------------------------


def _make_generation_provider(config: RunConfig):
    gen = config.generation
    if gen.kind == "mock":
        return MockProvider.from_jsonl(gen.script_path, provider_id=gen.model_id or "mock")
    if gen.kind == "http":
        if not gen.base_url or not gen.model_id:
            raise ConfigError("http generation provider needs base_url and model_id")
        return HttpProvider(gen.base_url, gen.model_id, gen.api_key_env)
    raise ConfigError(f"unknown generation provider kind {gen.kind!r}")


def _make_embedding_provider(config: RunConfig):
    emb = config.embedding
    if emb.kind == "local":
        return ranking.LocalEmbeddingProvider(dimension=emb.dimension)
    if emb.kind == "http":
        if not emb.base_url or not emb.model_id:
            raise ConfigError("http embedding provider needs base_url and model_id")
        return ranking.HttpEmbeddingProvider(emb.base_url, emb.model_id, emb.api_key_env)
    raise ConfigError(f"unknown embedding provider kind {emb.kind!r}")


def _make_runner(config: RunConfig):
    if config.validation.runner == "scripted":
        return ScriptedRunner.from_json(config.validation.script_path)
    if config.validation.runner == "subprocess":
        return SubprocessRunner()
    raise ConfigError(f"unknown runner kind {config.validation.runner!r}")


def _gen_params(config: RunConfig) -> GenParams:
    try:
        return GenParams(
            temperature=config.temperature,
            n_samples=config.n_samples,
            max_gen_tokens=config.max_gen_tokens,
            context_budget=config.generation.context_budget,
            mode=GenMode(config.generation.mode),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _filtered_records(corpus: Corpus, config: RunConfig) -> list[BugRecord]:
    if not config.bug_filter:
        return list(corpus)
    records = []
    for bug_id in config.bug_filter:
        if bug_id not in corpus:
            raise UnknownBugId(f"bug_filter names unknown bug {bug_id!r}")
        records.append(corpus.get(bug_id))
    return records


def _manifest_path(config: RunConfig) -> Path:
    return Path(config.cache_dir) / "manifest.json"


def _results_path(config: RunConfig) -> Path:
    return Path(config.cache_dir) / "results.json"


def _load_manifest(config: RunConfig) -> dict:
    path = _manifest_path(config)
    if not path.exists():
        raise ConfigError(f"manifest not found (run generate first): {path}")
    return json.loads(path.read_text(encoding="utf-8"))


def _load_results(config: RunConfig) -> dict:
    path = _results_path(config)
    if not path.exists():
        raise ConfigError(f"results not found (run validate first): {path}")
    return json.loads(path.read_text(encoding="utf-8"))


def _collect_candidates(
    config: RunConfig, corpus: Corpus, provider, params: GenParams
) -> dict[str, list[CandidatePatch]]:
    """Prompt + sample every filtered bug; warm caches mean zero provider
    calls on replay."""
    cache = SampleCache(config.cache_dir)
    strategy = Strategy(config.strategy)
    out: dict[str, list[CandidatePatch]] = {}
    for record in _filtered_records(corpus, config):
        prompt = build_prompt(record, strategy, corpus)
        prompt = fit_to_budget(prompt, params.context_budget, params.max_gen_tokens)
        out[record.bug_id] = sample(
            provider,
            prompt,
            params,
            cache,
            concurrency=config.generation.concurrency,
        )
    return out


def _outcome_path(config: RunConfig, bug_id: str, content_hash: str) -> Path:
    return Path(config.cache_dir) / "outcomes" / bug_id / f"{content_hash}.json"


def _load_outcome(config: RunConfig, bug_id: str, content_hash: str) -> ValidationOutcome:
    path = _outcome_path(config, bug_id, content_hash)
    if not path.exists():
        raise ranking.MissingOutcome(content_hash)
    payload = json.loads(path.read_text(encoding="utf-8"))
    if payload.get("partial"):
        raise ranking.MissingOutcome(content_hash)
    return ValidationOutcome.from_dict(payload)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_generate(config: RunConfig) -> dict:
    corpus = load_corpus(config.corpus_path)
    provider = _make_generation_provider(config)
    params = _gen_params(config)
    strategy = Strategy(config.strategy)
    cache = SampleCache(config.cache_dir)

    entries = []
    digests = {}
    records = _filtered_records(corpus, config)
    for i, record in enumerate(records, 1):
        prompt = build_prompt(record, strategy, corpus)
        prompt = fit_to_budget(prompt, params.context_budget, params.max_gen_tokens)
        candidates = sample(
            provider, prompt, params, cache, concurrency=config.generation.concurrency
        )
        stats = dedup_stats(candidates)
        print(
            f"[{i}/{len(records)}] {record.bug_id}: {len(candidates)} candidates, "
            f"{stats.unique_count} unique"
        )
        digests[record.bug_id] = prompt_digest(prompt, params)
        for cand in candidates:
            entries.append(
                {
                    "bug_id": cand.bug_id,
                    "index": cand.sample_index,
                    "content_hash": cand.content_hash,
                }
            )
    manifest = {
        "provider_id": provider.provider_id,
        "strategy": config.strategy,
        "temperature": config.temperature,
        "n_samples": config.n_samples,
        "mode": config.generation.mode,
        "prompt_digests": digests,
        "entries": entries,
    }
    atomic_write_json(_manifest_path(config), manifest)
    print(f"manifest: {_manifest_path(config)} ({len(entries)} entries)")
    return manifest


def cmd_validate(config: RunConfig) -> dict:
    manifest = _load_manifest(config)
    corpus = load_corpus(config.corpus_path)
    provider = _make_generation_provider(config)
    params = _gen_params(config)
    candidates_by_bug = _collect_candidates(config, corpus, provider, params)

    runner = _make_runner(config)
    validator = Validator(
        runner, config.cache_dir, stage_timeout_s=config.validation.stage_timeout_s
    )

    tasks: list[tuple[BugRecord, CandidatePatch]] = []
    for bug_id, candidates in candidates_by_bug.items():
        record = corpus.get(bug_id)
        seen: set[str] = set()
        for cand in candidates:
            if cand.content_hash not in seen:
                seen.add(cand.content_hash)
                tasks.append((record, cand))

    def run(task):
        record, cand = task
        return validator.validate(record, cand)

    workers = max(1, config.validation.workers)
    if workers == 1 or len(tasks) <= 1:
        outcomes = [run(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, tasks))
    outcome_by_key = {(o.bug_id, o.content_hash): o for o in outcomes}

    bug_rows = []
    for bug_id, candidates in candidates_by_bug.items():
        record = corpus.get(bug_id)
        fixed_canonical = metrics.canonical_form(record.fixed_function)
        statuses = [
            outcome_by_key[(bug_id, cand.content_hash)] for cand in candidates
        ]
        result = BugResult(
            bug_id=bug_id,
            project=record.project,
            n=len(candidates),
            c=sum(1 for o in statuses if o.status is PatchStatus.PLAUSIBLE),
            compile_count=sum(
                1 for o in statuses if o.stage_results.get("compile") == "pass"
            ),
            unique_count=dedup_stats(candidates).unique_count,
            em_count=sum(
                1 for cand in candidates if cand.canonical == fixed_canonical
            ),
        )
        bug_rows.append(result)
        print(
            f"{bug_id}: n={result.n} plausible={result.c} "
            f"compile={result.compile_count} unique={result.unique_count}"
        )

    results = {
        "model": manifest["provider_id"],
        "strategy": manifest["strategy"],
        "temperature": manifest["temperature"],
        "n_samples": manifest["n_samples"],
        "bugs": [
            {
                "bug_id": r.bug_id,
                "project": r.project,
                "n": r.n,
                "c": r.c,
                "compile_count": r.compile_count,
                "unique_count": r.unique_count,
                "em_count": r.em_count,
            }
            for r in bug_rows
        ],
    }
    atomic_write_json(_results_path(config), results)
    print(f"results: {_results_path(config)}")
    return results


def _bug_results_from(results: dict) -> list[BugResult]:
    return [BugResult(**row) for row in results["bugs"]]


def cmd_report(config: RunConfig, compare: list | None = None) -> None:
    results = _load_results(config)
    bug_results = _bug_results_from(results)
    report_dir = Path(config.report_dir)
    report_dir.mkdir(parents=True, exist_ok=True)

    rows = reporting.passk_rows(bug_results)
    reporting.write_passk_csv(report_dir / "passk.csv", rows)
    reporting.render_passk_figure(report_dir / "passk.png", rows)
    reporting.write_json(
        report_dir / "summary.json",
        reporting.summary_payload(bug_results, rows, results),
    )
    reporting.write_per_project_csv(report_dir / "per_project.csv", bug_results)

    _report_similarity(config, results, report_dir)

    if compare:
        sets = {results["model"]: _fixed_set(results)}
        for other_path in compare:
            other = json.loads(Path(other_path).read_text(encoding="utf-8"))
            label = other.get("model", Path(other_path).stem)
            if label in sets:
                label = f"{label}#{len(sets)}"
            sets[label] = _fixed_set(other)
        reporting.write_json(report_dir / "overlap.json", metrics.overlap(sets))
        print(f"overlap over {len(sets)} runs written")
    print(f"report: {report_dir}")


def _fixed_set(results: dict) -> set:
    return {row["bug_id"] for row in results["bugs"] if row["c"] >= 1}


def _report_similarity(config: RunConfig, results: dict, report_dir: Path) -> None:
    from .codesim import ReferenceUnparsable, codebleu

    corpus = load_corpus(config.corpus_path)
    provider = _make_generation_provider(config)
    params = _gen_params(config)
    candidates_by_bug = _collect_candidates(config, corpus, provider, params)

    to_buggy: dict[str, list[float]] = {"plausible": [], "non_plausible": []}
    to_fixed: dict[str, list[float]] = {"plausible": [], "non_plausible": []}
    medians_by_bug: list[tuple[float, float]] = []
    paired_plausible: list[tuple[float, float]] = []
    skipped = 0

    for bug_id, candidates in candidates_by_bug.items():
        record = corpus.get(bug_id)
        groups = dedup_stats(candidates).groups
        bug_scores: dict[str, list[float]] = {"plausible": [], "non_plausible": []}
        for cand in candidates:
            if cand.sample_index != min(groups[cand.content_hash]):
                continue  # score each unique patch once, then replicate
            weight = len(groups[cand.content_hash])
            outcome = _load_outcome(config, bug_id, cand.content_hash)
            label = (
                "plausible"
                if outcome.status is PatchStatus.PLAUSIBLE
                else "non_plausible"
            )
            try:
                buggy_score = codebleu(cand.patch_text, record.buggy_function).codebleu
                fixed_score = codebleu(cand.patch_text, record.fixed_function).codebleu
            except ReferenceUnparsable:
                skipped += 1
                continue
            to_buggy[label].extend([buggy_score] * weight)
            to_fixed[label].extend([fixed_score] * weight)
            bug_scores[label].extend([buggy_score] * weight)
            if label == "plausible":
                paired_plausible.extend([(buggy_score, fixed_score)] * weight)
        if bug_scores["plausible"] and bug_scores["non_plausible"]:
            medians_by_bug.append(
                (
                    metrics.quantile(bug_scores["plausible"], 0.5),
                    metrics.quantile(bug_scores["non_plausible"], 0.5),
                )
            )

    payload = reporting.similarity_payload(
        to_buggy, to_fixed, medians_by_bug, paired_plausible
    )
    if skipped:
        payload["skipped_unparsable_references"] = skipped
    reporting.write_json(report_dir / "similarity.json", payload)
    reporting.render_similarity_figure(
        report_dir / "similarity.png", to_buggy, to_fixed
    )


def cmd_rank(config: RunConfig, variant_override: str | None = None) -> list[dict]:
    results = _load_results(config)
    bug_results = _bug_results_from(results)
    corpus = load_corpus(config.corpus_path)
    provider = _make_generation_provider(config)
    params = _gen_params(config)
    candidates_by_bug = _collect_candidates(config, corpus, provider, params)

    embedder = _make_embedding_provider(config)
    emb_cache = ranking.EmbeddingCache(config.cache_dir)

    sims_by_bug: dict[str, dict[str, float]] = {}
    compile_by_bug: dict[str, dict[str, str]] = {}
    status_by_bug: dict[str, dict[str, str]] = {}
    all_scores: list[float] = []
    for bug_id, candidates in candidates_by_bug.items():
        record = corpus.get(bug_id)
        buggy_vec = ranking.embed(embedder, record.buggy_function, emb_cache)
        sims: dict[str, float] = {}
        compiles: dict[str, str] = {}
        statuses: dict[str, str] = {}
        for cand in candidates:
            if cand.content_hash in sims:
                continue
            outcome = _load_outcome(config, bug_id, cand.content_hash)
            compiles[cand.content_hash] = outcome.stage_results.get("compile", "fail")
            statuses[cand.content_hash] = outcome.status.value
            try:
                vec = ranking.embed(embedder, cand.patch_text, emb_cache)
                score = ranking.cosine(buggy_vec, vec)
                all_scores.append(score)
            except (ValueError, ranking.ZeroVector):
                score = -1.0  # unembeddable (e.g. empty) patches always prune
            sims[cand.content_hash] = score
        sims_by_bug[bug_id] = sims
        compile_by_bug[bug_id] = compiles
        status_by_bug[bug_id] = statuses

    if config.ranking.threshold == "median":
        threshold = ranking.compute_threshold(all_scores)
    else:
        threshold = float(config.ranking.threshold)

    variant_choice = variant_override or config.ranking.variant
    variants = (
        [ranking.VARIANT_ALL, ranking.VARIANT_COMPILE_PRUNED]
        if variant_choice == "both"
        else [variant_choice]
    )

    suggestions: dict[str, dict[str, dict]] = {v: {} for v in variants}
    for bug_id, sims in sims_by_bug.items():
        both = ranking.rank_variants(bug_id, sims, compile_by_bug[bug_id], threshold)
        for variant in variants:
            suggestions[variant][bug_id] = both[variant].to_dict()

    result_by_bug = {r.bug_id: r for r in bug_results}
    table = []
    for variant in variants:
        ranked_list = [
            ranking.RankedSuggestions(
                bug_id=bug_id,
                entries=tuple(
                    ranking.RankEntry(e["content_hash"], e["similarity"], e["rank"])
                    for e in payload["entries"]
                ),
                pruned=payload["pruned"],
                threshold_used=payload["threshold_used"],
                variant=variant,
            )
            for bug_id, payload in suggestions[variant].items()
        ]
        for k in (1, 5):
            r_pass = ranking.r_pass_at_k(ranked_list, status_by_bug, k)
            table.append(
                {
                    "variant": variant,
                    "k": k,
                    "r_pass": r_pass,
                    "pass": 100.0 * _variant_pass_at_k(result_by_bug, variant, k),
                }
            )

    report_dir = Path(config.report_dir)
    report_dir.mkdir(parents=True, exist_ok=True)
    reporting.write_ranking_csv(report_dir / "ranking.csv", table)
    reporting.write_json(
        report_dir / "suggestions.json",
        {"threshold": threshold, "variants": suggestions},
    )
    for row in table:
        print(
            f"{row['variant']}: r.P@{row['k']} = {row['r_pass']:.2f} "
            f"(P@{row['k']} = {row['pass']:.2f})"
        )
    return table


def _variant_pass_at_k(result_by_bug: dict, variant: str, k: int) -> float:
    """pass@k over all candidates, or over the compile-passing subset."""
    values = []
    for r in result_by_bug.values():
        n = r.n if variant == ranking.VARIANT_ALL else r.compile_count
        if n == 0 or r.c == 0:
            values.append(0.0)
            continue
        values.append(metrics.pass_at_k(n, min(r.c, n), min(k, n)))
    return sum(values) / len(values) if values else 0.0


def cmd_run(config: RunConfig, compare: list | None = None) -> None:
    cmd_generate(config)
    cmd_validate(config)
    cmd_report(config, compare=compare)
    cmd_rank(config)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nl2fix",
        description="Evaluate and rank candidate bug-fix patches generated "
        "from natural-language issue descriptions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("generate", "validate", "report", "rank", "run"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to JSON run config")
        p.add_argument("--bugs", help="comma-separated bug_id filter")
        p.add_argument(
            "--strategy",
            choices=[s.value for s in Strategy],
        )
        p.add_argument("--temperature", type=float)
        p.add_argument("--samples", type=int)
        p.add_argument("--jobs", type=int)
        p.add_argument("--threshold", help="similarity threshold or 'median'")
        p.add_argument("--variant", choices=["all", "compile-pruned"])
        if name in ("report", "run"):
            p.add_argument(
                "--compare",
                nargs="+",
                help="other runs' results.json files for the overlap report",
            )
    return parser


def _apply_overrides(config: RunConfig, args: argparse.Namespace) -> None:
    if args.bugs:
        config.bug_filter = [b.strip() for b in args.bugs.split(",") if b.strip()]
    if args.strategy:
        config.strategy = args.strategy
    if args.temperature is not None:
        config.temperature = args.temperature
    if args.samples is not None:
        config.n_samples = args.samples
    if args.jobs is not None:
        config.validation.workers = args.jobs
        config.generation.concurrency = args.jobs
    if args.threshold is not None:
        config.ranking.threshold = (
            "median" if args.threshold == "median" else float(args.threshold)
        )
    if args.variant:
        config.ranking.variant = args.variant


def main(argv: list | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        _apply_overrides(config, args)
        compare = getattr(args, "compare", None)
        if args.command == "generate":
            cmd_generate(config)
        elif args.command == "validate":
            cmd_validate(config)
        elif args.command == "report":
            cmd_report(config, compare=compare)
        elif args.command == "rank":
            cmd_rank(config)
        elif args.command == "run":
            cmd_run(config, compare=compare)
        return 0
    except (ConfigError, CorpusError, PromptError, BudgetExceeded,
            MockScriptError, RunnerScriptError, ranking.MissingOutcome,
            metrics.MetricsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ProviderExhausted as exc:
        print(f"provider exhausted: {exc}", file=sys.stderr)
        return 3
    except ValidationError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 4


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
