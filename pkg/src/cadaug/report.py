"""Report rendering: markdown tables, the flat accuracy CSV, dataset counts."""

from __future__ import annotations

import json
from pathlib import Path

from .dataset import PROVENANCES
from .pipeline import ResultMatrix

__all__ = ["write_report", "render_matrix_csv", "render_report_md"]

_ACC = "{:.6f}"


def render_matrix_csv(matrix: ResultMatrix) -> str:
    """One row per (model, trained_on, tested_on) cell, in canonical order."""
    lines = ["model,trained_on,tested_on,accuracy"]
    for model in matrix.models:
        for trained_on in PROVENANCES:
            for tested_on in PROVENANCES:
                acc = matrix.cell(model, trained_on, tested_on)
                lines.append(f"{model},{trained_on},{tested_on},{_ACC.format(acc)}")
    return "\n".join(lines) + "\n"


def _accuracy_table(matrix: ResultMatrix, trained_on: str) -> list[str]:
    header = "| model | " + " | ".join(f"{p} test" for p in PROVENANCES) + " |"
    rule = "|---" * (len(PROVENANCES) + 1) + "|"
    best = {
        tested_on: max(matrix.cell(m, trained_on, tested_on) for m in matrix.models)
        for tested_on in PROVENANCES
    }
    lines = [header, rule]
    for model in matrix.models:
        cells = []
        for tested_on in PROVENANCES:
            acc = matrix.cell(model, trained_on, tested_on)
            text = _ACC.format(acc)
            if acc == best[tested_on]:
                text = f"**{text}**"
            cells.append(text)
        lines.append(f"| {model} | " + " | ".join(cells) + " |")
    return lines


def render_report_md(matrix: ResultMatrix) -> str:
    lines = [
        "# CAD variable-ordering experiment",
        "",
        f"- labeller: {matrix.labeller}",
        f"- master seed: {matrix.seed}",
        f"- features: {matrix.feature_counts['raw']} raw, "
        f"{matrix.feature_counts['distinct']} essentially distinct",
        "",
        "## Datasets",
        "",
        "| dataset | rows | " + " | ".join(f"class {c}" for c in range(6)) + " |",
        "|---" * 8 + "|",
    ]
    for role in ("train", "test"):
        for provenance in PROVENANCES:
            name = f"{role}_{provenance}"
            info = matrix.dataset_summary[name]
            counts = " | ".join(str(c) for c in info["class_counts"])
            lines.append(f"| {name} | {info['rows']} | {counts} |")
    for trained_on in PROVENANCES:
        lines += [
            "",
            f"## Accuracy — models trained on the {trained_on} dataset",
            "",
            *_accuracy_table(matrix, trained_on),
        ]
    lines += [
        "",
        "## Uniform-random baseline",
        "",
        "| tested on | accuracy |",
        "|---|---|",
    ]
    for tested_on in PROVENANCES:
        lines.append(f"| {tested_on} test | {_ACC.format(matrix.baseline[tested_on])} |")
    lines += [
        "",
        "## Improvement on the balanced test set (average over models)",
        "",
    ]
    for key, title in (
        ("balanced_vs_unbalanced_pct", "balanced-trained vs unbalanced-trained"),
        ("augmented_vs_unbalanced_pct", "augmented-trained vs unbalanced-trained"),
    ):
        value = matrix.improvements.get(key)
        rendered = "n/a" if value is None else f"{value:+.1f}%"
        lines.append(f"- {title}: {rendered}")
    return "\n".join(lines) + "\n"


def write_report(matrix: ResultMatrix, out_dir: str | Path) -> None:
    """Emit report.md, matrix.csv, and datasets.json under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "matrix.csv").write_text(render_matrix_csv(matrix))
    (out / "report.md").write_text(render_report_md(matrix))
    payload = {
        "datasets": matrix.dataset_summary,
        "feature_counts": matrix.feature_counts,
        "baseline": matrix.baseline,
    }
    (out / "datasets.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n"
    )
