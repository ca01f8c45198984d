"""Regenerate the synthetic fixture corpora under fixtures/.

Run from the repo root:  python3 tools/make_fixtures.py
The ranking corpus asserts its engineered similarity bands before writing
anything, so a broken fixture never lands on disk.
"""

from __future__ import annotations

import json
import sys
import textwrap
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from nl2fix.metrics import canonical_form  # noqa: E402
from nl2fix.ranking import LocalEmbeddingProvider, cosine  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]


def dedent(text: str) -> str:
    return textwrap.dedent(text).strip("\n")


def reindent(method: str, spaces: int) -> str:
    # Whitespace-only variant: same canonical form, different bytes.
    out = []
    for line in method.splitlines():
        stripped = line.lstrip()
        depth = (len(line) - len(stripped)) // 4
        out.append(" " * (spaces * depth) + stripped)
    return "\n".join(out)


def record(bug_id, project, title, desc, buggy, fixed, file_name):
    method_lines = buggy.count("\n") + 1
    return {
        "bug_id": bug_id,
        "project": project,
        "issue_title": title,
        "issue_description": desc,
        "buggy_function": buggy,
        "fixed_function": fixed,
        "file_path": f"src/{file_name}",
        "method_span": [2, 1 + method_lines],
        "language": "java",
        "workspace_setup_cmd": f"provision {bug_id}",
        "compile_cmd": f"compile {bug_id}",
        "regression_cmd": f"regress {bug_id}",
        "trigger_cmd": f"trigger {bug_id}",
    }


def class_file(class_name: str, method: str) -> str:
    return f"public class {class_name} {{\n{method}\n}}\n"


# ---------------------------------------------------------------------------
# 5-bug end-to-end corpus
# ---------------------------------------------------------------------------

B1_BUGGY = dedent("""
    public static int clamp(int value, int lo, int hi) {
        if (value < lo) {
            return lo;
        }
        if (value > hi) {
            return lo;
        }
        return value;
    }
""")
B1_FIXED = B1_BUGGY.replace("if (value > hi) {\n        return lo;", "if (value > hi) {\n        return hi;")
B1_PLAUSIBLE = dedent("""
    public static int clamp(int value, int lo, int hi) {
        if (value < lo) {
            return lo;
        }
        if (value > hi) {
            int upper = hi;
            return upper;
        }
        return value;
    }
""")
B1_WRONG = dedent("""
    public static int clamp(int value, int lo, int hi) {
        if (value < lo) {
            return lo;
        }
        return value;
    }
""")
B1_BROKEN = dedent("""
    public static int clamp(int value, int lo, int hi) {
        if (value < lo) {
            return lo;
        @@BROKEN@@
    }
""")

B2_BUGGY = dedent("""
    public static int maxOfThree(int a, int b, int c) {
        int best = a;
        if (b > best) {
            best = b;
        }
        if (c > a) {
            best = c;
        }
        return best;
    }
""")
B2_FIXED = B2_BUGGY.replace("if (c > a) {", "if (c > best) {")
B2_PLAUSIBLE = dedent("""
    public static int maxOfThree(int a, int b, int c) {
        int result = a;
        if (b > result) {
            result = b;
        }
        if (c > result) {
            result = c;
        }
        return result;
    }
""")
B2_WRONG_TRIGGER = dedent("""
    public static int maxOfThree(int a, int b, int c) {
        return a;
    }
""")
B2_WRONG_REGRESSION = dedent("""
    public static int maxOfThree(int a, int b, int c) {
        int regressBreaker = b;
        if (regressBreaker > a) {
            return regressBreaker;
        }
        return c;
    }
""")
B2_BROKEN = "public static int maxOfThree(int a, int b, int c) { return @@BROKEN@@"

B3_BUGGY = dedent("""
    public String formatLabel(double value, boolean percent) {
        String text = String.valueOf(value);
        if (percent) {
            return text;
        }
        return text + "%";
    }
""")
B3_FIXED = dedent("""
    public String formatLabel(double value, boolean percent) {
        String text = String.valueOf(value);
        if (percent) {
            return text + "%";
        }
        return text;
    }
""")
B3_WRONG_A = dedent("""
    public String formatLabel(double value, boolean percent) {
        String text = String.valueOf(value);
        return text;
    }
""")
B3_WRONG_B = dedent("""
    public String formatLabel(double value, boolean percent) {
        return String.valueOf(value) + "%";
    }
""")
B3_BROKEN = dedent("""
    public String formatLabel(double value, boolean percent) {
        String text = String.@@BROKEN@@
    }
""")

B4_BUGGY = dedent("""
    public double total(double[] values) {
        double sum = 0.0;
        for (int i = 1; i < values.length; i++) {
            sum += values[i];
        }
        return sum;
    }
""")
B4_FIXED = B4_BUGGY.replace("int i = 1", "int i = 0")
B4_PLAUSIBLE_A = dedent("""
    public double total(double[] values) {
        double sum = 0.0;
        for (int j = 0; j < values.length; j++) {
            sum += values[j];
        }
        return sum;
    }
""")
B4_PLAUSIBLE_B = dedent("""
    public double total(double[] values) {
        double sum = 0.0;
        int i = 0;
        while (i < values.length) {
            sum += values[i];
            i++;
        }
        return sum;
    }
""")

B5_BUGGY = dedent("""
    public static double ratio(double num, double den) {
        if (den == 0.0) {
            return 0.0;
        }
        return num * den;
    }
""")
B5_FIXED = B5_BUGGY.replace("return num * den;", "return num / den;")
B5_WRONG_A = B5_BUGGY.replace("return num * den;", "return num + den;")
B5_WRONG_B = dedent("""
    public static double ratio(double num, double den) {
        if (den == 0.0) {
            return 0.0;
        }
        return den / num;
    }
""")
B5_BROKEN = "public static double ratio(double num, double den) { @@BROKEN@@ }"


def fenced(prose: str, code: str, tag: str = "java") -> str:
    return f"{prose}\n```{tag}\n{code}\n```\n"


def synthetic_corpus() -> tuple[list[dict], list[dict], dict]:
    records = [
        record("B-1", "Lang", "clamp returns wrong bound",
               "Values above the upper bound come back as the lower bound instead of the upper one.",
               B1_BUGGY, B1_FIXED, "Clamp.java"),
        record("B-2", "Lang", "maxOfThree ignores third argument sometimes",
               "When c is between a and the current best, the third argument is compared against a instead of the running maximum.",
               B2_BUGGY, B2_FIXED, "Maxima.java"),
        record("B-3", "Chart", "percent flag appends nothing",
               "Labels render the percent sign on plain labels and omit it when percent formatting is requested.",
               B3_BUGGY, B3_FIXED, "Labels.java"),
        record("B-4", "Chart", "total skips the first element",
               "Summation starts at index 1, silently dropping the first value of the series.",
               B4_BUGGY, B4_FIXED, "Series.java"),
        record("B-5", "Math", "ratio multiplies instead of dividing",
               "The ratio helper multiplies numerator and denominator; division is expected.",
               B5_BUGGY, B5_FIXED, "Ratio.java"),
    ]

    responses = [
        # B-1: plausible (fenced), wrong, broken, whitespace-duplicate of idx0
        {"bug_id": "B-1", "index": 0, "stage": 1,
         "response": fenced("Here is the corrected function:", B1_PLAUSIBLE)},
        {"bug_id": "B-1", "index": 1, "stage": 1, "response": B1_WRONG},
        {"bug_id": "B-1", "index": 2, "stage": 1, "response": B1_BROKEN},
        {"bug_id": "B-1", "index": 3, "stage": 1, "response": reindent(B1_PLAUSIBLE, 2)},
        # B-2: wrong via signature-line extraction, plausible fenced, wrong-regression, broken
        {"bug_id": "B-2", "index": 0, "stage": 1,
         "response": "The issue is subtle.\n" + B2_WRONG_TRIGGER},
        {"bug_id": "B-2", "index": 1, "stage": 1, "response": fenced("Fix:", B2_PLAUSIBLE, tag="")},
        {"bug_id": "B-2", "index": 2, "stage": 1, "response": B2_WRONG_REGRESSION},
        {"bug_id": "B-2", "index": 3, "stage": 1, "response": B2_BROKEN},
        # B-3: no plausible patch at all
        {"bug_id": "B-3", "index": 0, "stage": 1, "response": B3_WRONG_A},
        {"bug_id": "B-3", "index": 1, "stage": 1, "response": reindent(B3_WRONG_A, 8)},
        {"bug_id": "B-3", "index": 2, "stage": 1, "response": B3_BROKEN},
        {"bug_id": "B-3", "index": 3, "stage": 1, "response": fenced("Try this.", B3_WRONG_B)},
        # B-4: every candidate plausible, heavy duplication
        {"bug_id": "B-4", "index": 0, "stage": 1, "response": B4_PLAUSIBLE_A},
        {"bug_id": "B-4", "index": 1, "stage": 1, "response": reindent(B4_PLAUSIBLE_A, 2)},
        {"bug_id": "B-4", "index": 2, "stage": 1, "response": reindent(B4_PLAUSIBLE_A, 8)},
        {"bug_id": "B-4", "index": 3, "stage": 1, "response": fenced("Loop rewrite:", B4_PLAUSIBLE_B)},
        # B-5: exact-match fix plus two wrongs and a broken one
        {"bug_id": "B-5", "index": 0, "stage": 1, "response": fenced("Divide instead:", reindent(B5_FIXED, 2))},
        {"bug_id": "B-5", "index": 1, "stage": 1, "response": B5_WRONG_A},
        {"bug_id": "B-5", "index": 2, "stage": 1, "response": B5_WRONG_B},
        {"bug_id": "B-5", "index": 3, "stage": 1, "response": B5_BROKEN},
    ]

    runner_script = {}
    for rec, class_name, buggy, plausible_markers in (
        (records[0], "Clamp", B1_BUGGY, ["int upper = hi;", "return hi;"]),
        (records[1], "Maxima", B2_BUGGY, ["c > best", "c > result"]),
        (records[2], "Labels", B3_BUGGY, ["@@FIXMARK@@"]),
        (records[3], "Series", B4_BUGGY, ["int j = 0", "int i = 0"]),
        (records[4], "Ratio", B5_BUGGY, ["num / den"]),
    ):
        bug_id = rec["bug_id"]
        file_path = rec["file_path"]
        runner_script[f"provision {bug_id}"] = {
            "exit": 0,
            "files": {file_path: class_file(class_name, buggy)},
        }
        runner_script[f"compile {bug_id}"] = {
            "exit": 0,
            "cases": [{"file": file_path, "contains": "@@BROKEN@@", "exit": 1}],
        }
        regress_cases = []
        if bug_id == "B-2":
            regress_cases.append({"file": file_path, "contains": "regressBreaker", "exit": 1})
        runner_script[f"regress {bug_id}"] = {"exit": 0, "cases": regress_cases}
        runner_script[f"trigger {bug_id}"] = {
            "exit": 1,
            "cases": [
                {"file": file_path, "contains": marker, "exit": 0}
                for marker in plausible_markers
            ],
        }
    return records, responses, runner_script


# ---------------------------------------------------------------------------
# 10-bug ranking corpus: plausible sims in [0.95, 0.99], the rest below 0.95
# ---------------------------------------------------------------------------


def ranking_bug(i: int) -> tuple[dict, list[dict], dict, dict]:
    name = f"scoreItems{i:02d}"
    buggy = dedent(f"""
        public static int {name}(int[] items, int limit) {{
            int total = 0;
            for (int index = 0; index < items.length; index++) {{
                int current = items[index];
                if (current > limit) {{
                    total += limit;
                }} else {{
                    total += current;
                }}
            }}
            return total;
        }}
    """)
    fixed = buggy.replace("if (current > limit) {", "if (current >= limit) {")
    # Same fix with a variable renamed: close to the buggy code, but far
    # enough that the hashed-bag cosine lands inside [0.95, 0.99].
    plausible = fixed.replace("current", "value")
    wrong = dedent(f"""
        public static int {name}(int[] items, int limit) {{
            java.util.Arrays.sort(items);
            StringBuilder joined = new StringBuilder();
            for (int x : items) {{
                joined.append(x).append(',');
            }}
            return joined.length() - limit * 3 + 7;
        }}
    """)
    broken = f"public static int {name}(int[] items, int limit) {{ @@BROKEN@@"

    bug_id = f"R-{i:02d}"
    rec = record(
        bug_id, "Rank", f"{name} miscounts boundary items",
        "Items exactly at the limit should be capped like larger ones, but the comparison is strict.",
        buggy, fixed, f"Score{i:02d}.java",
    )
    responses = [
        {"bug_id": bug_id, "index": 0, "stage": 1, "response": plausible},
        {"bug_id": bug_id, "index": 1, "stage": 1, "response": wrong},
        {"bug_id": bug_id, "index": 2, "stage": 1, "response": broken},
    ]
    file_path = rec["file_path"]
    script = {
        f"provision {bug_id}": {"exit": 0, "files": {file_path: class_file(f"Score{i:02d}", buggy)}},
        f"compile {bug_id}": {"exit": 0, "cases": [{"file": file_path, "contains": "@@BROKEN@@", "exit": 1}]},
        f"regress {bug_id}": {"exit": 0},
        f"trigger {bug_id}": {"exit": 1, "cases": [{"file": file_path, "contains": ">= limit", "exit": 0}]},
    }
    sims = {"buggy": buggy, "plausible": plausible, "wrong": wrong}
    return rec, responses, script, sims


def check_ranking_bands(sims: dict) -> tuple[float, float]:
    embedder = LocalEmbeddingProvider()
    buggy_vec = embedder.embed_text(sims["buggy"])
    plaus = cosine(buggy_vec, embedder.embed_text(sims["plausible"]))
    wrong = cosine(buggy_vec, embedder.embed_text(sims["wrong"]))
    assert 0.95 <= plaus <= 0.99, f"plausible similarity {plaus} outside [0.95, 0.99]"
    assert wrong < 0.95, f"wrong similarity {wrong} not below 0.95"
    return plaus, wrong


def write_jsonl(path: Path, rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False))
            fh.write("\n")


def write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def base_config(n_samples: int) -> dict:
    return {
        "corpus_path": "corpus.jsonl",
        "cache_dir": "cache",
        "report_dir": "reports",
        "generation_provider": {
            "kind": "mock",
            "model_id": "mock-model",
            "script_path": "mock_responses.jsonl",
            "context_budget": 4096,
            "mode": "chat",
            "concurrency": 2,
        },
        "embedding_provider": {"kind": "local", "dimension": 512},
        "strategy": "zero-shot",
        "temperature": 0.8,
        "n_samples": n_samples,
        "max_gen_tokens": 750,
        "validation": {
            "workers": 2,
            "stage_timeout_s": 60,
            "runner": "scripted",
            "script_path": "runner_script.json",
        },
        "ranking": {"threshold": 0.95, "variant": "both"},
        "seed": 0,
    }


def main() -> None:
    records, responses, runner_script = synthetic_corpus()
    for rec in records:
        assert canonical_form(rec["buggy_function"]) != canonical_form(rec["fixed_function"])
    out = ROOT / "fixtures" / "synthetic"
    write_jsonl(out / "corpus.jsonl", records)
    write_jsonl(out / "mock_responses.jsonl", responses)
    write_json(out / "runner_script.json", runner_script)
    write_json(out / "config.json", base_config(n_samples=4))
    print(f"synthetic corpus: {len(records)} bugs -> {out}")

    rank_records, rank_responses, rank_script, bands = [], [], {}, []
    for i in range(1, 11):
        rec, responses, script, sims = ranking_bug(i)
        bands.append(check_ranking_bands(sims))
        rank_records.append(rec)
        rank_responses.extend(responses)
        rank_script.update(script)
    out = ROOT / "fixtures" / "ranking"
    write_jsonl(out / "corpus.jsonl", rank_records)
    write_jsonl(out / "mock_responses.jsonl", rank_responses)
    write_json(out / "runner_script.json", rank_script)
    write_json(out / "config.json", base_config(n_samples=3))
    lo = min(b[0] for b in bands)
    hi = max(b[0] for b in bands)
    wmax = max(b[1] for b in bands)
    print(f"ranking corpus: 10 bugs -> {out}")
    print(f"  plausible sims in [{lo:.4f}, {hi:.4f}], wrong sims <= {wmax:.4f}")


if __name__ == "__main__":
    main()
